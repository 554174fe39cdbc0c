//! Stability probes for the transformed equation, scattering pullbacks and the
//! support-approximation Monte Carlo.
//!
//! Everything here runs in `f64`. Monte Carlo loops fan samples out over rayon and
//! merge them in sample order, so reports are bit-reproducible for a given seed.

mod scattering;
mod stability;
mod support;

use serde::{Deserialize, Serialize};

pub use scattering::{scattering_diagnostic, ScatteringReport};
pub use stability::{
    stability_probe, stability_sweep, ForcingKind, StabilityEntry, StabilityReport,
};
pub use support::{interpolation_convergence, support_comparison, SupportReport, SupportSetup};

/// Monte Carlo mean with its standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStat {
    pub level: u32,
    pub mean: f64,
    pub se: f64,
    pub samples: usize,
}

impl LevelStat {
    /// Mean and standard error of `values`, summed in order.
    pub fn from_samples(level: u32, values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                level,
                mean: 0.0,
                se: 0.0,
                samples: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            level,
            mean,
            se,
            samples: n,
        }
    }
}

/// True when every mean is below the previous one by more than `margin` standard errors
/// of the previous level.
pub fn strictly_decreasing(stats: &[LevelStat], margin: f64) -> bool {
    stats
        .windows(2)
        .all(|w| w[1].mean < w[0].mean - margin * w[0].se)
}
