use crate::error::Result;
use crate::noise::NoiseModel;
use crate::real::Real;
use crate::rescaling::gauge;
use crate::spectral::{free_evolve, ComplexField, Sign};

/// Free flow over `dt`: `free_evolve(f, dt, +1)`.
pub fn substep_linear<R: Real>(f: &ComplexField<R>, dt: R) -> ComplexField<R> {
    free_evolve(f, dt, Sign::Plus)
}

/// Exact flow of `i X_t = λ |X|^{α-1} X`: `X exp(-i λ |X|^{α-1} dt)`.
pub fn substep_nonlinear<R: Real>(
    f: &ComplexField<R>,
    dt: R,
    lambda: R,
    alpha: R,
) -> ComplexField<R> {
    let half = (alpha - R::one()) / R::lit(2.0);
    f.map(|z| {
        let theta = -lambda * dt * z.norm_sqr().powf(half);
        z * num_complex::Complex::new(theta.cos(), theta.sin())
    })
}

/// Exact noise and compensator flow over `[t, t + dt]` for the given increments.
pub fn substep_noise<R: Real>(
    f: &ComplexField<R>,
    noise: &NoiseModel<R>,
    t: f64,
    dt: f64,
    increments: &[f64],
) -> Result<ComplexField<R>> {
    gauge(f, &noise.phase_increment(t, dt, increments), 1)
}
