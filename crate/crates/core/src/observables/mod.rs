//! Mass, Hamiltonian, Itô residuals and norm profiles of trajectories.

mod profile;
mod residual;

pub use profile::{norm_profile, s0_norm, s1_norm, NormProfile, PairNorms};
pub use residual::{
    fit_residual_order, ito_energy_residual, ito_mass_residual, EnergyTerms, ItoResidualReport,
};

use crate::real::Real;
use crate::spectral::{gradient, ComplexField};

/// `|f|_2^2 = h^d Σ |f|^2`.
pub fn mass<R: Real>(f: &ComplexField<R>) -> R {
    f.values().iter().fold(R::zero(), |s, z| s + z.norm_sqr()) * f.grid().cell_volume()
}

/// `h^d Σ |∇f|^2` with the spectral gradient.
pub fn kinetic<R: Real>(f: &ComplexField<R>) -> R {
    gradient_energy(&gradient(f))
}

pub(crate) fn gradient_energy<R: Real>(grad: &[ComplexField<R>]) -> R {
    let h = match grad.first() {
        Some(g) => g.grid().cell_volume(),
        None => return R::zero(),
    };
    grad.iter()
        .map(|g| g.values().iter().fold(R::zero(), |s, z| s + z.norm_sqr()))
        .fold(R::zero(), |a, b| a + b)
        * h
}

/// `h^d Σ |f|^{α+1}`.
pub fn potential<R: Real>(f: &ComplexField<R>, alpha: R) -> R {
    let half = (alpha + R::one()) / R::lit(2.0);
    f.values()
        .iter()
        .fold(R::zero(), |s, z| s + z.norm_sqr().powf(half))
        * f.grid().cell_volume()
}

/// `H(f) = ½ |∇f|_2^2 - λ/(α+1) |f|^{α+1}_{α+1}`.
pub fn hamiltonian<R: Real>(f: &ComplexField<R>, lambda: R, alpha: R) -> R {
    R::lit(0.5) * kinetic(f) - lambda / (alpha + R::one()) * potential(f, alpha)
}

/// `(|f|_2^2 + |∇f|_2^2)^{1/2}`.
pub fn h1_norm<R: Real>(f: &ComplexField<R>) -> R {
    (mass(f) + kinetic(f)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use num_complex::Complex;

    #[test]
    fn mass_of_simple_fields() {
        let g = TorusGrid::<f64>::new(2, 16, 3.0).unwrap();
        assert_eq!(mass(&ComplexField::zeros(g)), 0.0);
        assert!((mass(&ComplexField::constant(g, Complex::new(1.0, 0.0))) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass_against_doubled_grid() {
        let m = |n| {
            let g = TorusGrid::<f64>::new(1, n, 20.0).unwrap();
            mass(&ComplexField::from_fn(g, |x| {
                Complex::new((-x[0] * x[0]).exp(), 0.0)
            }))
        };
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((m(128) - m(256)).abs() < 1e-8);
        assert!((m(256) - exact).abs() < 1e-8);
    }

    #[test]
    fn plane_wave_hamiltonian() {
        let g = TorusGrid::<f64>::new(2, 16, 4.0).unwrap();
        let a = 0.7;
        let f = ComplexField::plane_wave(g, [2, -1, 0], Complex::new(a, 0.0));
        let k2 = (2.0 * std::f64::consts::PI / 4.0).powi(2) * 5.0;
        let alpha = 3.0;
        let expect = 0.5 * a * a * k2 * 16.0 + a.powf(alpha + 1.0) * 16.0 / (alpha + 1.0);
        assert!((hamiltonian(&f, -1.0, alpha) - expect).abs() < 1e-10 * expect);
        assert_eq!(hamiltonian(&ComplexField::zeros(g), -1.0, alpha), 0.0);
    }
}
