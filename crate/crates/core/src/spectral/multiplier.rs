use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::field::ComplexField;
use super::fourier::Fourier;
use super::grid::{norm_sq3, TorusGrid};
use crate::real::Real;

/// Direction of a group action (`+1` or `-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<R: Real>(self) -> R {
        match self {
            Sign::Plus => R::one(),
            Sign::Minus => -R::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Fourier multiplier `m(xi)`.
#[derive(Clone)]
pub enum SpectralMultiplier<R> {
    /// Japanese bracket power `<xi>^s = (1 + |xi|^2)^(s/2)`.
    Bracket(R),
    /// Free propagator `exp(i sign t |xi|^2)`.
    Propagator { time: R, sign: Sign },
    /// 2/3-rule projection.
    Dealias,
    /// Symbol of the Laplacian, `-|xi|^2`.
    Laplacian,
    /// Symbol of `d/dx_axis`, `i xi_axis` (Nyquist mode zeroed).
    Derivative(usize),
    /// Arbitrary symbol of the wave vector.
    Custom(Arc<dyn Fn([R; 3]) -> Complex<R> + Send + Sync>),
}

impl<R: Real> fmt::Debug for SpectralMultiplier<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bracket(s) => write!(f, "Bracket({s})"),
            Self::Propagator { time, sign } => write!(f, "Propagator({time}, {sign:?})"),
            Self::Dealias => write!(f, "Dealias"),
            Self::Laplacian => write!(f, "Laplacian"),
            Self::Derivative(a) => write!(f, "Derivative({a})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl<R: Real> SpectralMultiplier<R> {
    /// Symbol value at flat spectral index `flat` of `grid`.
    pub fn symbol_at(&self, grid: &TorusGrid<R>, flat: usize) -> Complex<R> {
        let xi = grid.wavevector(flat);
        match self {
            Self::Bracket(s) => {
                Complex::new((R::one() + norm_sq3(xi)).powf(*s / R::lit(2.0)), R::zero())
            }
            Self::Propagator { time, sign } => {
                let phase = sign.value::<R>() * *time * norm_sq3(xi);
                Complex::new(phase.cos(), phase.sin())
            }
            Self::Dealias => {
                let n = grid.points();
                let idx = grid.multi_index(flat);
                let keep = (0..grid.dim()).all(|a| 3 * grid.wrap(idx[a]).unsigned_abs() <= n);
                Complex::new(if keep { R::one() } else { R::zero() }, R::zero())
            }
            Self::Laplacian => Complex::new(-norm_sq3(xi), R::zero()),
            Self::Derivative(axis) => {
                let idx = grid.multi_index(flat);
                if *axis >= grid.dim() || idx[*axis] == grid.points() / 2 {
                    Complex::new(R::zero(), R::zero())
                } else {
                    Complex::new(R::zero(), xi[*axis])
                }
            }
            Self::Custom(symbol) => symbol(xi),
        }
    }
}

/// Applies `m` mode-wise: the result's spectrum is `m(xi) * f_hat(xi)`.
pub fn apply_multiplier<R: Real>(
    f: &ComplexField<R>,
    m: &SpectralMultiplier<R>,
) -> ComplexField<R> {
    let mut fourier = Fourier::new(f.grid());
    apply_with(&mut fourier, f, m)
}

pub(crate) fn apply_with<R: Real>(
    fourier: &mut Fourier<R>,
    f: &ComplexField<R>,
    m: &SpectralMultiplier<R>,
) -> ComplexField<R> {
    let grid = *f.grid();
    let mut values = f.values().to_vec();
    fourier.forward(&mut values);
    for (flat, z) in values.iter_mut().enumerate() {
        *z = *z * m.symbol_at(&grid, flat);
    }
    fourier.inverse(&mut values);
    ComplexField::from_raw(grid, values)
}

/// Free Schrödinger flow: spectrum multiplied by `exp(i sign t |xi|^2)`.
///
/// `Sign::Plus` solves `i u_t = Laplacian u` forward in time. `time = 0` returns `f` unchanged.
pub fn free_evolve<R: Real>(f: &ComplexField<R>, time: R, sign: Sign) -> ComplexField<R> {
    if time == R::zero() {
        return f.clone();
    }
    apply_multiplier(f, &SpectralMultiplier::Propagator { time, sign })
}

/// Spectral gradient, one field per axis.
pub fn gradient<R: Real>(f: &ComplexField<R>) -> Vec<ComplexField<R>> {
    let mut fourier = Fourier::new(f.grid());
    gradient_with(&mut fourier, f)
}

pub(crate) fn gradient_with<R: Real>(
    fourier: &mut Fourier<R>,
    f: &ComplexField<R>,
) -> Vec<ComplexField<R>> {
    let grid = *f.grid();
    let mut spec = f.values().to_vec();
    fourier.forward(&mut spec);
    (0..grid.dim())
        .map(|axis| {
            let m = SpectralMultiplier::Derivative(axis);
            let mut values: Vec<_> = spec
                .iter()
                .enumerate()
                .map(|(i, &z)| z * m.symbol_at(&grid, i))
                .collect();
            fourier.inverse(&mut values);
            ComplexField::from_raw(grid, values)
        })
        .collect()
}

pub fn laplacian<R: Real>(f: &ComplexField<R>) -> ComplexField<R> {
    apply_multiplier(f, &SpectralMultiplier::Laplacian)
}
