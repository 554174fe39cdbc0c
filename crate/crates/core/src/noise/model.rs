use num_complex::Complex;

use super::amplitude::TimeAmplitude;
use super::profile::NoiseProfile;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{ComplexField, TorusGrid};

/// Relative threshold of the outer-shell decay check.
pub const DECAY_TOLERANCE: f64 = 1e-8;

/// One noise channel `G_k(t, x) = g_k(t) φ_k(x)`.
#[derive(Clone, Debug)]
pub struct NoiseChannel<R: Real> {
    pub profile: NoiseProfile<R>,
    pub amplitude: TimeAmplitude,
}

/// The collection of channels with the compensators `μ` and `μ̂`.
#[derive(Clone, Debug)]
pub struct NoiseModel<R: Real> {
    grid: TorusGrid<R>,
    channels: Vec<NoiseChannel<R>>,
    /// Per channel `ψ_k = Re(φ_k) φ_k` with its gradient and Laplacian.
    compensator: Vec<NoiseProfile<R>>,
    conservative: bool,
    decay_checked: bool,
}

impl<R: Real> NoiseModel<R> {
    /// Builds a model and checks the outer-shell decay of every profile.
    pub fn new(channels: Vec<NoiseChannel<R>>) -> Result<Self> {
        let model = Self::new_unchecked(channels)?;
        for (k, ch) in model.channels.iter().enumerate() {
            let (shell, global) = ch.profile.decay_proxy();
            if shell > R::lit(DECAY_TOLERANCE) * global {
                return Err(Error::Domain(format!(
                    "profile {k} is not flat near the boundary (shell {:e} vs max {:e})",
                    shell.as_f64(),
                    global.as_f64()
                )));
            }
        }
        Ok(Self {
            decay_checked: true,
            ..model
        })
    }

    /// Builds a model without the decay check (e.g. spatially constant test profiles).
    pub fn new_unchecked(channels: Vec<NoiseChannel<R>>) -> Result<Self> {
        let Some(first) = channels.first() else {
            return Err(Error::Domain(
                "a noise model needs at least one channel".into(),
            ));
        };
        let grid = *first.profile.grid();
        for ch in &channels {
            grid.ensure_same(ch.profile.grid(), "noise model")?;
            ch.amplitude.validate()?;
        }
        let compensator = channels
            .iter()
            .map(|ch| ch.profile.re_times_self())
            .collect();
        let conservative = channels.iter().all(|ch| ch.profile.is_purely_imaginary());
        Ok(Self {
            grid,
            channels,
            compensator,
            conservative,
            decay_checked: false,
        })
    }

    pub fn grid(&self) -> &TorusGrid<R> {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, k: usize) -> &NoiseChannel<R> {
        &self.channels[k]
    }

    pub fn is_conservative(&self) -> bool {
        self.conservative
    }

    pub fn decay_checked(&self) -> bool {
        self.decay_checked
    }

    #[inline]
    pub fn g(&self, k: usize, t: f64) -> f64 {
        self.channels[k].amplitude.eval(t)
    }

    /// Time after which every amplitude vanishes, if one exists.
    pub fn support_end(&self) -> Option<f64> {
        self.channels
            .iter()
            .map(|c| c.amplitude.support_end())
            .try_fold(f64::NEG_INFINITY, |a, e| e.map(|e| a.max(e)))
    }

    /// `G_k(t)` as a field.
    pub fn field(&self, k: usize, t: f64) -> ComplexField<R> {
        let g = R::lit(self.g(k, t));
        self.channels[k].profile.phi().map(|z| z * g)
    }

    /// `μ(t) = ½ Σ |G_k|^2`, stored as a real-valued complex field.
    pub fn mu(&self, t: f64) -> ComplexField<R> {
        let mut out = vec![Complex::new(R::zero(), R::zero()); self.grid.len()];
        for (k, ch) in self.channels.iter().enumerate() {
            let g2 = R::lit(0.5 * self.g(k, t).powi(2));
            for (o, z) in out.iter_mut().zip(ch.profile.phi().values()) {
                o.re = o.re + g2 * z.norm_sqr();
            }
        }
        ComplexField::from_raw(self.grid, out)
    }

    /// `μ̂(t) = Σ Re(G_k) G_k`.
    pub fn mu_hat(&self, t: f64) -> ComplexField<R> {
        let mut out = ComplexField::zeros(self.grid);
        for (k, rp) in self.compensator.iter().enumerate() {
            let g2 = R::lit(self.g(k, t).powi(2));
            out.axpy(Complex::new(g2, R::zero()), rp.phi())
                .expect("same grid");
        }
        out
    }

    /// Coordinates of one step's phase increment in the basis `(φ_1..φ_N, ψ_1..ψ_N)`:
    /// `g_k(t) Δβ_k` and `-½ (g_k(t)^2 + g_k(t+dt)^2) dt`.
    pub fn step_coefficients(&self, t: f64, dt: f64, increments: &[f64]) -> Vec<f64> {
        let n = self.channels.len();
        debug_assert_eq!(increments.len(), n);
        let mut out = vec![0.0; 2 * n];
        for k in 0..n {
            let g0 = self.g(k, t);
            out[k] = g0 * increments[k];
            out[n + k] = -0.5 * dt * (g0 * g0 + self.g(k, t + dt).powi(2));
        }
        out
    }

    fn combine_with(
        &self,
        coeffs: &[f64],
        pick: impl Fn(&NoiseProfile<R>) -> &ComplexField<R>,
    ) -> ComplexField<R> {
        let n = self.channels.len();
        assert_eq!(
            coeffs.len(),
            2 * n,
            "phase coefficients must have length 2N"
        );
        let mut out = ComplexField::zeros(self.grid);
        for k in 0..n {
            if coeffs[k] != 0.0 {
                out.axpy(
                    Complex::new(R::lit(coeffs[k]), R::zero()),
                    pick(&self.channels[k].profile),
                )
                .expect("same grid");
            }
            if !self.conservative && coeffs[n + k] != 0.0 {
                out.axpy(
                    Complex::new(R::lit(coeffs[n + k]), R::zero()),
                    pick(&self.compensator[k]),
                )
                .expect("same grid");
            }
        }
        out
    }

    /// Field `Σ a_k φ_k + Σ m_k ψ_k` for coefficients `[a.., m..]`.
    pub fn combine(&self, coeffs: &[f64]) -> ComplexField<R> {
        self.combine_with(coeffs, |p| p.phi())
    }

    /// Gradient of [`combine`](Self::combine), assembled from the stored profile derivatives.
    pub fn combine_gradient(&self, coeffs: &[f64]) -> Vec<ComplexField<R>> {
        (0..self.grid.dim())
            .map(|a| self.combine_with(coeffs, |p| &p.grad()[a]))
            .collect()
    }

    /// Laplacian of [`combine`](Self::combine).
    pub fn combine_laplacian(&self, coeffs: &[f64]) -> ComplexField<R> {
        self.combine_with(coeffs, |p| p.lap())
    }

    /// Exponent of one exact noise substep on `[t, t + dt]`:
    /// `Σ_k G_k(t) Δβ_k - ½ (μ̂(t) + μ̂(t + dt)) dt`.
    ///
    /// The solvers and the phase constructions all go through here so that they
    /// consume identical increments.
    pub fn phase_increment(&self, t: f64, dt: f64, increments: &[f64]) -> ComplexField<R> {
        self.combine(&self.step_coefficients(t, dt, increments))
    }

    /// Same model on `f32`/`f64` via value casts.
    pub fn cast<S: Real>(&self) -> Result<NoiseModel<S>> {
        let channels = self
            .channels
            .iter()
            .map(|c| {
                Ok(NoiseChannel {
                    profile: c.profile.cast()?,
                    amplitude: c.amplitude.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = NoiseModel::new_unchecked(channels)?;
        Ok(NoiseModel {
            decay_checked: self.decay_checked,
            ..m
        })
    }
}
