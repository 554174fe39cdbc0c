use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Uniform time mesh `t_j = t0 + j dt`, `j = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeMesh {
    t0: f64,
    dt: f64,
    steps: usize,
}

impl TimeMesh {
    pub fn new(t0: f64, dt: f64, steps: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return domain(format!("time step must be positive and finite (got {dt})"));
        }
        if steps == 0 {
            return domain("a time mesh needs at least one step");
        }
        Ok(Self { t0, dt, steps })
    }

    /// Mesh on `[0, horizon]` with step `dt`; `horizon / dt` must be an integer.
    pub fn covering(horizon: f64, dt: f64) -> Result<Self> {
        let steps = integer_ratio(horizon, dt).ok_or_else(|| {
            Error::Domain(format!("horizon {horizon} is not a multiple of dt {dt}"))
        })?;
        Self::new(0.0, dt, steps)
    }

    #[inline]
    pub fn t0(&self) -> f64 {
        self.t0
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.steps
    }

    #[inline]
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| self.time(j)).collect()
    }

    /// Mesh with `factor` times larger step covering the same interval.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps.is_multiple_of(factor) {
            return Err(Error::MeshMismatch(format!(
                "{} steps cannot be coarsened by {factor}",
                self.steps
            )));
        }
        Self::new(self.t0, self.dt * factor as f64, self.steps / factor)
    }

    pub(crate) fn ensure_same(&self, other: &Self, context: &str) -> Result<()> {
        let close = (self.t0 - other.t0).abs() <= 1e-12 * (1.0 + self.t0.abs())
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt
            && self.steps == other.steps;
        if close {
            Ok(())
        } else {
            Err(Error::MeshMismatch(format!(
                "{context}: {self:?} vs {other:?}"
            )))
        }
    }
}

/// `a / b` when it is (to rounding) a positive integer.
pub(crate) fn integer_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let rounded = r.round();
    if rounded >= 1.0 && (r - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        Some(rounded as usize)
    } else {
        None
    }
}
