use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::problem::{ProblemInfo, SolverConfig};
use crate::error::Result;
use crate::observables::mass;
use crate::real::Real;
use crate::spectral::{ComplexField, SpaceTimeSeries, TorusGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Spde,
    Controlled,
    RandomPde,
    Deterministic,
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    /// `|X|_∞` crossed the blow-up ceiling at `time`.
    BlowUp {
        time: f64,
    },
    /// A non-finite value appeared in the step ending at `time`; the last finite state is kept.
    NonFinite {
        time: f64,
    },
}

/// Stored snapshots of one solve with its provenance.
#[derive(Clone, Debug)]
pub struct Trajectory<R: Real> {
    pub series: SpaceTimeSeries<R>,
    pub equation: Equation,
    pub problem: ProblemInfo,
    pub config: SolverConfig,
    /// `(seed, sample)` of the driving noise, if any.
    pub fingerprint: Option<(u64, u64)>,
    pub t0: f64,
    /// Mass after every step, starting with the initial state.
    pub mass: Vec<f64>,
    pub status: RunStatus,
}

impl<R: Real> Trajectory<R> {
    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Complete
    }

    pub fn final_state(&self) -> &ComplexField<R> {
        self.series
            .last()
            .expect("a trajectory stores at least its initial state")
    }

    /// Times of the per-step mass record.
    pub fn mass_times(&self) -> Vec<f64> {
        (0..self.mass.len())
            .map(|j| self.t0 + j as f64 * self.config.dt)
            .collect()
    }

    pub fn grid(&self) -> &TorusGrid<R> {
        self.final_state().grid()
    }
}

/// Snapshot storage, mass record and the blow-up / finiteness sentinels.
pub(crate) struct Recorder<R: Real> {
    grid: TorusGrid<R>,
    series: SpaceTimeSeries<R>,
    mass: Vec<f64>,
    stride: usize,
    t0: f64,
    dt: f64,
    ceiling: R,
    last_stored: usize,
    pub status: RunStatus,
}

impl<R: Real> Recorder<R> {
    pub fn new(initial: &ComplexField<R>, t0: f64, config: &SolverConfig) -> Result<Self> {
        let mut series = SpaceTimeSeries::empty();
        series.push(R::lit(t0), initial.clone())?;
        let scale = initial.max_abs();
        let ceiling = if scale > R::zero() {
            scale * R::lit(config.blowup_factor)
        } else {
            R::infinity()
        };
        Ok(Self {
            grid: *initial.grid(),
            series,
            mass: vec![mass(initial).as_f64()],
            stride: config.store_stride,
            t0,
            dt: config.dt,
            ceiling,
            last_stored: 0,
            status: RunStatus::Complete,
        })
    }

    fn time(&self, step: usize) -> f64 {
        self.t0 + step as f64 * self.dt
    }

    /// Records the state after `step` steps; returns false when the run must stop.
    pub fn record(
        &mut self,
        step: usize,
        state: &[Complex<R>],
        previous: &[Complex<R>],
        last: bool,
    ) -> Result<bool> {
        let finite = state.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            self.status = RunStatus::NonFinite {
                time: self.time(step),
            };
            if self.last_stored != step - 1 {
                self.push(step - 1, previous)?;
            }
            return Ok(false);
        }
        let field = ComplexField::from_raw(self.grid, state.to_vec());
        self.mass.push(mass(&field).as_f64());
        let blown = field.max_abs() > self.ceiling;
        if blown {
            self.status = RunStatus::BlowUp {
                time: self.time(step),
            };
        }
        if blown || last || step.is_multiple_of(self.stride) {
            self.series.push(R::lit(self.time(step)), field)?;
            self.last_stored = step;
        }
        Ok(!blown)
    }

    fn push(&mut self, step: usize, state: &[Complex<R>]) -> Result<()> {
        self.series.push(
            R::lit(self.time(step)),
            ComplexField::from_raw(self.grid, state.to_vec()),
        )?;
        self.last_stored = step;
        Ok(())
    }

    pub fn finish(
        self,
        equation: Equation,
        problem: ProblemInfo,
        config: SolverConfig,
        fingerprint: Option<(u64, u64)>,
    ) -> Trajectory<R> {
        Trajectory {
            series: self.series,
            equation,
            problem,
            config,
            fingerprint,
            t0: self.t0,
            mass: self.mass,
            status: self.status,
        }
    }
}
