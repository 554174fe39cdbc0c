use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::real::Real;
use crate::spectral::{ComplexField, TorusGrid};

/// Which scaling the power nonlinearity is critical for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    /// `α = 1 + 4/d`
    Mass,
    /// `α = 1 + 4/(d-2)`, `d ≥ 3`
    Energy,
}

impl Criticality {
    pub fn alpha(self, dim: usize) -> Result<f64> {
        match self {
            Self::Mass => Ok(1.0 + 4.0 / dim as f64),
            Self::Energy if dim >= 3 => Ok(1.0 + 4.0 / (dim as f64 - 2.0)),
            Self::Energy => Err(Error::Config(format!(
                "energy-critical runs need d >= 3 (got {dim})"
            ))),
        }
    }
}

/// Equation data: nonlinearity, noise and initial state.
#[derive(Clone, Debug)]
pub struct ProblemSpec<R: Real> {
    criticality: Criticality,
    lambda: f64,
    initial: ComplexField<R>,
    noise: Option<NoiseModel<R>>,
    nonlinear: bool,
}

impl<R: Real> ProblemSpec<R> {
    /// `lambda` is `-1` (defocusing) or `+1` (focusing).
    pub fn new(
        criticality: Criticality,
        lambda: f64,
        initial: ComplexField<R>,
        noise: Option<NoiseModel<R>>,
    ) -> Result<Self> {
        criticality.alpha(initial.grid().dim())?;
        if lambda != 1.0 && lambda != -1.0 {
            return Err(Error::Config(format!(
                "lambda must be -1 or +1 (got {lambda})"
            )));
        }
        if !initial.is_finite() {
            return Err(Error::Config("initial datum must be finite".into()));
        }
        if let Some(n) = &noise {
            initial.grid().ensure_same(n.grid(), "problem noise")?;
        }
        Ok(Self {
            criticality,
            lambda,
            initial,
            noise,
            nonlinear: true,
        })
    }

    /// Switches the nonlinearity off (`F ≡ 0`) or back on.
    pub fn with_nonlinearity(mut self, on: bool) -> Self {
        self.nonlinear = on;
        self
    }

    pub fn with_initial(mut self, initial: ComplexField<R>) -> Result<Self> {
        self.initial
            .grid()
            .ensure_same(initial.grid(), "initial datum")?;
        self.initial = initial;
        Ok(self)
    }

    pub fn without_noise(mut self) -> Self {
        self.noise = None;
        self
    }

    pub fn criticality(&self) -> Criticality {
        self.criticality
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.criticality
            .alpha(self.grid().dim())
            .expect("validated on construction")
    }

    pub fn initial(&self) -> &ComplexField<R> {
        &self.initial
    }

    pub fn noise(&self) -> Option<&NoiseModel<R>> {
        self.noise.as_ref()
    }

    pub fn nonlinear(&self) -> bool {
        self.nonlinear
    }

    pub fn grid(&self) -> &TorusGrid<R> {
        self.initial.grid()
    }

    pub(crate) fn info(&self) -> ProblemInfo {
        ProblemInfo {
            criticality: self.criticality,
            lambda: self.lambda,
            alpha: self.alpha(),
            nonlinear: self.nonlinear,
            grid: self.grid().cast(),
            channels: self.noise.as_ref().map_or(0, |n| n.channels()),
            conservative: self.noise.as_ref().is_none_or(|n| n.is_conservative()),
        }
    }
}

/// Serializable summary of a [`ProblemSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub criticality: Criticality,
    pub lambda: f64,
    pub alpha: f64,
    pub nonlinear: bool,
    pub grid: TorusGrid<f64>,
    pub channels: usize,
    pub conservative: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// noise, nonlinear, linear
    Lie,
    /// half linear, noise, nonlinear, half linear
    Strang,
}

/// Time-stepping parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// 2/3-rule mask; `None` enables it for `α ≥ 3`.
    pub dealias: Option<bool>,
    /// Store every `store_stride`-th step (the final state is always stored).
    pub store_stride: usize,
    /// Stop when `|X|_∞` exceeds this multiple of `|X_0|_∞`.
    pub blowup_factor: f64,
}

impl SolverConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            scheme: Scheme::Lie,
            dealias: None,
            store_stride: 1,
            blowup_factor: 1e6,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = Some(on);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.store_stride = stride;
        self
    }

    pub fn dealias_for(&self, alpha: f64) -> bool {
        self.dealias.unwrap_or(alpha >= 3.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!(
                "dt must be positive (got {})",
                self.dt
            )));
        }
        if self.store_stride == 0 {
            return Err(Error::Config("store_stride must be at least 1".into()));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::Config("blowup_factor must exceed 1".into()));
        }
        Ok(())
    }
}
