//! Run configuration, orchestration, trajectory persistence and verification.

mod build;
mod config;
mod run;
mod store;

use serde::Serialize;

pub use config::{
    load_config, parse_config, AmplitudeSpec, ChannelSpec, ConfigErrors, ConfigIssue, ControlSpec,
    ExperimentSpec, FieldSpec, NoiseBlock, ProblemBlock, ProfileSpec, RunConfig, SolverBlock,
};
pub use run::{run, RunOutcome, RUN_FORMAT};
pub use store::{
    read_trajectory, verify_trajectory, write_trajectory, SnapshotEntry, StoredTrajectory,
    TrajectoryManifest, TRAJECTORY_FORMAT, VERIFY_TOLERANCE,
};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit codes of the command-line front end.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

/// Exit code for an error that stopped a run.
pub fn exit_code_for(e: &crate::Error) -> i32 {
    match e {
        crate::Error::Numerical(_) | crate::Error::Overflow { .. } => exit::NUMERICAL,
        _ => exit::USAGE,
    }
}

/// One named pass/fail check with the measured value and its threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= threshold,
            value: Some(value),
            threshold: Some(threshold),
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= threshold,
            value: Some(value),
            threshold: Some(threshold),
        }
    }

    pub fn boolean(name: &str, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            value: None,
            threshold: None,
        }
    }
}
