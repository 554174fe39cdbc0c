//! Lebesgue, mixed space-time, local smoothing and exotic Strichartz norms.
//!
//! Spatial integrals use the `h^d` grid quadrature; time integrals use the
//! trapezoid rule on the stored sample times.

use num_complex::Complex;

use super::field::ComplexField;
use super::fourier::Fourier;
use super::multiplier::{apply_with, SpectralMultiplier};
use super::series::SpaceTimeSeries;
use crate::error::{domain, Result};
use crate::real::Real;

fn check_exponent<R: Real>(p: R, name: &str) -> Result<()> {
    if p.is_nan() || p < R::one() {
        return domain(format!("exponent {name} = {p} must satisfy {name} >= 1"));
    }
    Ok(())
}

/// `(h^d sum |a|^p)^(1/p)` over magnitudes, or the max for `p = inf`.
fn lp_of_magnitudes<R: Real>(mags: impl Iterator<Item = R> + Clone, weight: R, p: R) -> R {
    let max = mags.clone().fold(R::zero(), R::max);
    if p.is_infinite() || max == R::zero() {
        return max;
    }
    let sum = mags.fold(R::zero(), |s, a| s + (a / max).powf(p));
    max * (weight * sum).powf(R::one() / p)
}

/// Grid `L^p` norm.
pub fn lp_norm<R: Real>(f: &ComplexField<R>, p: R) -> Result<R> {
    check_exponent(p, "p")?;
    Ok(lp_of_magnitudes(
        f.values().iter().map(|z| z.norm()),
        f.grid().cell_volume(),
        p,
    ))
}

/// `(int a(t)^q dt)^(1/q)` with the trapezoid rule, or `max a` for `q = inf`.
pub fn time_norm<R: Real>(times: &[R], values: &[R], q: R) -> Result<R> {
    check_exponent(q, "q")?;
    if values.is_empty() {
        return domain("time norm of an empty series");
    }
    let max = values.iter().copied().fold(R::zero(), R::max);
    if q.is_infinite() {
        return Ok(max);
    }
    if values.len() < 2 {
        return domain("a finite time exponent needs at least two time samples");
    }
    if max == R::zero() {
        return Ok(R::zero());
    }
    let half = R::lit(0.5);
    let integral = times
        .windows(2)
        .zip(values.windows(2))
        .fold(R::zero(), |s, (t, a)| {
            s + half * ((a[0] / max).powf(q) + (a[1] / max).powf(q)) * (t[1] - t[0])
        });
    Ok(max * integral.powf(R::one() / q))
}

/// `L^q_t L^p_x` norm of a series.
pub fn mixed_spacetime_norm<R: Real>(s: &SpaceTimeSeries<R>, q: R, p: R) -> Result<R> {
    check_exponent(p, "p")?;
    if s.is_empty() {
        return domain("mixed norm of an empty series");
    }
    let spatial: Vec<R> = s
        .fields()
        .iter()
        .map(|f| lp_norm(f, p))
        .collect::<Result<_>>()?;
    time_norm(s.times(), &spatial, q)
}

/// `L^q_t W^{s,p}_x` norm: the multiplier `<nabla>^s` is applied before the spatial norm.
pub fn sobolev_spacetime_norm<R: Real>(s: &SpaceTimeSeries<R>, q: R, p: R, order: R) -> Result<R> {
    check_exponent(p, "p")?;
    let Some(grid) = s.grid() else {
        return domain("mixed norm of an empty series");
    };
    let mut fourier = Fourier::new(grid);
    let m = SpectralMultiplier::Bracket(order);
    let spatial: Vec<R> = s
        .fields()
        .iter()
        .map(|f| lp_norm(&apply_with(&mut fourier, f, &m), p))
        .collect::<Result<_>>()?;
    time_norm(s.times(), &spatial, q)
}

/// `L^q_t L^p_x` norm of the gradient magnitude `|nabla u|`.
pub fn gradient_spacetime_norm<R: Real>(s: &SpaceTimeSeries<R>, q: R, p: R) -> Result<R> {
    check_exponent(p, "p")?;
    let Some(grid) = s.grid() else {
        return domain("mixed norm of an empty series");
    };
    let mut fourier = Fourier::new(grid);
    let weight = grid.cell_volume();
    let spatial: Vec<R> = s
        .fields()
        .iter()
        .map(|f| {
            let grads = super::multiplier::gradient_with(&mut fourier, f);
            let mags: Vec<R> = (0..grid.len())
                .map(|i| {
                    grads
                        .iter()
                        .fold(R::zero(), |acc, g| acc + g.values()[i].norm_sqr())
                        .sqrt()
                })
                .collect();
            lp_of_magnitudes(mags.iter().copied(), weight, p)
        })
        .collect();
    time_norm(s.times(), &spatial, q)
}

/// Local smoothing norm `(int int <x>^{2 beta} |<nabla>^alpha u|^2 dx dt)^(1/2)`.
pub fn local_smoothing_norm<R: Real>(s: &SpaceTimeSeries<R>, alpha: R, beta: R) -> Result<R> {
    let Some(grid) = s.grid() else {
        return domain("local smoothing norm of an empty series");
    };
    let grid = *grid;
    let weights: Vec<R> = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            (R::one() + super::grid::norm_sq3(x)).powf(beta)
        })
        .collect();
    let mut fourier = Fourier::new(&grid);
    let m = SpectralMultiplier::Bracket(alpha);
    let h = grid.cell_volume();
    let densities: Vec<R> = s
        .fields()
        .iter()
        .map(|f| {
            let smoothed = apply_with(&mut fourier, f, &m);
            h * smoothed
                .values()
                .iter()
                .zip(&weights)
                .fold(R::zero(), |acc, (z, &w)| acc + w * z.norm_sqr())
        })
        .collect();
    if densities.len() < 2 {
        return domain("local smoothing norm needs at least two time samples");
    }
    let half = R::lit(0.5);
    let integral = s
        .times()
        .windows(2)
        .zip(densities.windows(2))
        .fold(R::zero(), |acc, (t, a)| {
            acc + half * (a[0] + a[1]) * (t[1] - t[0])
        });
    Ok(integral.sqrt())
}

/// The three exotic Strichartz spaces (defined for `d >= 3`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ExoticSpace {
    X0,
    XX,
    YY,
}

/// Exponents `(q, p, s)` of a space: time exponent, space exponent, derivative order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormExponents {
    pub q: f64,
    pub p: f64,
    pub order: f64,
}

impl ExoticSpace {
    pub fn exponents(self, dim: usize) -> Result<NormExponents> {
        if dim < 3 {
            return domain(format!(
                "exotic Strichartz norms need d >= 3 so that d - 2 > 0 (got d = {dim})"
            ));
        }
        let d = dim as f64;
        let q_x = d * (d + 2.0) / (2.0 * (d - 2.0));
        let num = 2.0 * d * d * (d + 2.0);
        Ok(match self {
            Self::X0 => NormExponents {
                q: q_x,
                p: num / ((d + 4.0) * (d - 2.0).powi(2)),
                order: 0.0,
            },
            Self::XX => NormExponents {
                q: q_x,
                p: num / (d.powi(3) - 4.0 * d + 16.0),
                order: 4.0 / (d + 2.0),
            },
            Self::YY => NormExponents {
                q: d / 2.0,
                p: num / (d.powi(3) + 4.0 * d * d + 4.0 * d - 16.0),
                order: 4.0 / (d + 2.0),
            },
        })
    }
}

pub fn exotic_norm<R: Real>(s: &SpaceTimeSeries<R>, which: ExoticSpace) -> Result<R> {
    let Some(grid) = s.grid() else {
        return domain("exotic norm of an empty series");
    };
    let e = which.exponents(grid.dim())?;
    if e.order == 0.0 {
        mixed_spacetime_norm(s, R::lit(e.q), R::lit(e.p))
    } else {
        sobolev_spacetime_norm(s, R::lit(e.q), R::lit(e.p), R::lit(e.order))
    }
}

/// Exponent of the mass-critical diagonal space `V = L^{2+4/d}_{t,x}`.
pub fn v_exponent(dim: usize) -> f64 {
    2.0 + 4.0 / dim as f64
}

/// `(q, p)` of the energy-critical Strichartz space `W` (`d >= 3`).
pub fn w_exponents(dim: usize) -> Result<(f64, f64)> {
    if dim < 3 {
        return domain(format!("W norms need d >= 3 (got d = {dim})"));
    }
    let d = dim as f64;
    Ok((
        2.0 * (d + 2.0) / (d - 2.0),
        2.0 * d * (d + 2.0) / (d * d + 4.0),
    ))
}

/// Diagonal energy-critical exponent `2(d+2)/(d-2)` (`d >= 3`).
pub fn energy_diagonal_exponent(dim: usize) -> Result<f64> {
    w_exponents(dim).map(|(q, _)| q)
}

pub fn v_norm<R: Real>(s: &SpaceTimeSeries<R>) -> Result<R> {
    let Some(grid) = s.grid() else {
        return domain("V norm of an empty series");
    };
    let e = R::lit(v_exponent(grid.dim()));
    mixed_spacetime_norm(s, e, e)
}

pub fn w_norm<R: Real>(s: &SpaceTimeSeries<R>) -> Result<R> {
    let Some(grid) = s.grid() else {
        return domain("W norm of an empty series");
    };
    let (q, p) = w_exponents(grid.dim())?;
    mixed_spacetime_norm(s, R::lit(q), R::lit(p))
}

/// `L^q_t W^{1,p}_x` with the `W` exponents, using `||<nabla> u||_p`.
pub fn ww_norm<R: Real>(s: &SpaceTimeSeries<R>) -> Result<R> {
    let Some(grid) = s.grid() else {
        return domain("W^1 norm of an empty series");
    };
    let (q, p) = w_exponents(grid.dim())?;
    sobolev_spacetime_norm(s, R::lit(q), R::lit(p), R::one())
}

/// Pointwise product helper for norm-inequality experiments: `|u|^power * v`.
pub fn power_product<R: Real>(
    u: &ComplexField<R>,
    power: R,
    v: &ComplexField<R>,
) -> Result<ComplexField<R>> {
    u.zip_map(v, |a, b| b * Complex::new(a.norm().powf(power), R::zero()))
}
