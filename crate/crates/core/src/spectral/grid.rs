use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::real::Real;

/// Centered periodic box `[-L/2, L/2)^d` sampled with `n` points per axis.
///
/// Flat indices are row-major with the last axis fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid<R> {
    dim: usize,
    points: usize,
    length: R,
}

impl<R: Real> TorusGrid<R> {
    pub fn new(dim: usize, points: usize, length: R) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return domain(format!("grid dimension must be 1, 2 or 3 (got {dim})"));
        }
        if points < 2 || !points.is_power_of_two() {
            return domain(format!(
                "points per axis must be a power of two >= 2 (got {points})"
            ));
        }
        if !(length > R::zero()) || !length.is_finite() {
            return domain(format!(
                "box length must be positive and finite (got {length})"
            ));
        }
        Ok(Self {
            dim,
            points,
            length,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn length(&self) -> R {
        self.length
    }

    #[inline]
    pub fn spacing(&self) -> R {
        self.length / R::lit(self.points as f64)
    }

    /// Total number of grid points, `n^d`.
    #[inline]
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^d`.
    #[inline]
    pub fn cell_volume(&self) -> R {
        self.spacing().powi(self.dim as i32)
    }

    #[inline]
    pub fn volume(&self) -> R {
        self.length.powi(self.dim as i32)
    }

    #[inline]
    pub fn coordinate(&self, i: usize) -> R {
        -self.length / R::lit(2.0) + R::lit(i as f64) * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<R> {
        (0..self.points).map(|i| self.coordinate(i)).collect()
    }

    /// Signed mode index: `m >= n/2` maps to `m - n`.
    #[inline]
    pub fn wrap(&self, m: usize) -> isize {
        if m >= self.points / 2 {
            m as isize - self.points as isize
        } else {
            m as isize
        }
    }

    #[inline]
    pub fn wavenumber(&self, m: usize) -> R {
        R::lit(2.0) * R::PI() / self.length * R::lit(self.wrap(m) as f64)
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rem % self.points;
            rem /= self.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        (0..self.dim).fold(0, |acc, axis| acc * self.points + idx[axis])
    }

    /// Physical position of a flat index; unused axes are zero.
    pub fn position(&self, flat: usize) -> [R; 3] {
        let idx = self.multi_index(flat);
        let mut x = [R::zero(); 3];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// Wave vector of a flat spectral index; unused axes are zero.
    pub fn wavevector(&self, flat: usize) -> [R; 3] {
        let idx = self.multi_index(flat);
        let mut xi = [R::zero(); 3];
        for axis in 0..self.dim {
            xi[axis] = self.wavenumber(idx[axis]);
        }
        xi
    }

    pub(crate) fn ensure_same(&self, other: &Self, context: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{context}: {}^{} on L={} vs {}^{} on L={}",
                self.points, self.dim, self.length, other.points, other.dim, other.length
            )))
        }
    }

    /// Casts the grid to another scalar type.
    pub fn cast<S: Real>(&self) -> TorusGrid<S> {
        TorusGrid {
            dim: self.dim,
            points: self.points,
            length: S::lit(self.length.as_f64()),
        }
    }
}

#[inline]
pub(crate) fn norm_sq3<R: Real>(v: [R; 3]) -> R {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(TorusGrid::<f64>::new(4, 8, 1.0).is_err());
        assert!(TorusGrid::<f64>::new(1, 12, 1.0).is_err());
        assert!(TorusGrid::<f64>::new(1, 8, 0.0).is_err());
        assert!(TorusGrid::<f64>::new(1, 8, f64::NAN).is_err());
    }

    #[test]
    fn coordinates_are_centered_and_uniform() {
        let g = TorusGrid::<f64>::new(1, 64, 10.0).unwrap();
        let x = g.coordinates();
        assert_eq!(x[0], -5.0);
        assert_eq!(g.spacing() * 64.0, 10.0);
        for w in x.windows(2) {
            assert!((w[1] - w[0] - g.spacing()).abs() < 1e-14);
        }
    }

    #[test]
    fn wavenumbers_wrap() {
        let g = TorusGrid::<f64>::new(1, 8, 2.0 * std::f64::consts::PI).unwrap();
        let k: Vec<f64> = (0..8).map(|m| g.wavenumber(m)).collect();
        assert_eq!(k, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn flat_index_round_trips() {
        let g = TorusGrid::<f64>::new(3, 4, 1.0).unwrap();
        for flat in 0..g.len() {
            assert_eq!(g.flat_index(g.multi_index(flat)), flat);
        }
        assert_eq!(g.multi_index(1), [0, 0, 1]);
    }
}
