use num_complex::Complex;

use super::grid::TorusGrid;
use crate::error::{domain, Error, Result};
use crate::real::Real;

/// Complex-valued grid function.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField<R> {
    grid: TorusGrid<R>,
    values: Vec<Complex<R>>,
}

impl<R: Real> ComplexField<R> {
    pub fn zeros(grid: TorusGrid<R>) -> Self {
        Self {
            grid,
            values: vec![Complex::new(R::zero(), R::zero()); grid.len()],
        }
    }

    pub fn constant(grid: TorusGrid<R>, value: Complex<R>) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_values(grid: TorusGrid<R>, values: Vec<Complex<R>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return domain("field contains non-finite values");
        }
        Ok(Self { grid, values })
    }

    /// Builds a field from a function of position.
    pub fn from_fn(grid: TorusGrid<R>, f: impl Fn([R; 3]) -> Complex<R>) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid, values }
    }

    /// Plane wave `amplitude * exp(i k.x)` with `k` given by signed mode indices.
    pub fn plane_wave(grid: TorusGrid<R>, modes: [isize; 3], amplitude: Complex<R>) -> Self {
        let base = R::lit(2.0) * R::PI() / grid.length();
        let k = modes.map(|m| base * R::lit(m as f64));
        Self::from_fn(grid, |x| {
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            amplitude * Complex::new(phase.cos(), phase.sin())
        })
    }

    pub(crate) fn from_raw(grid: TorusGrid<R>, values: Vec<Complex<R>>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid<R> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex<R>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex<R>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<R>> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> R {
        self.values.iter().fold(R::zero(), |m, z| m.max(z.norm()))
    }

    /// Discrete `l2` norm `(sum |f|^2)^(1/2)`, without quadrature weight.
    pub fn l2_sum(&self) -> R {
        self.values
            .iter()
            .fold(R::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    }

    pub fn map(&self, f: impl Fn(Complex<R>) -> Complex<R>) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_map(
        &self,
        other: &Self,
        f: impl Fn(Complex<R>, Complex<R>) -> Complex<R>,
    ) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "pointwise operation")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        self.map(|z| z * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn real_part(&self) -> Self {
        self.map(|z| Complex::new(z.re, R::zero()))
    }

    /// In-place `self += c * other`.
    pub fn axpy(&mut self, c: Complex<R>, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid, "axpy")?;
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a = *a + c * b;
        }
        Ok(())
    }

    pub fn cast<S: Real>(&self) -> ComplexField<S> {
        ComplexField {
            grid: self.grid.cast(),
            values: self
                .values
                .iter()
                .map(|z| Complex::new(S::lit(z.re.as_f64()), S::lit(z.im.as_f64())))
                .collect(),
        }
    }
}
