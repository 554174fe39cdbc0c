use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::field::ComplexField;
use super::grid::{norm_sq3, TorusGrid};
use crate::error::Result;
use crate::real::Real;

/// Multidimensional FFT workspace for one grid.
///
/// Forward transform is unnormalized; the inverse carries `1/n^d`.
pub struct Fourier<R: Real> {
    grid: TorusGrid<R>,
    forward: Arc<dyn Fft<R>>,
    inverse: Arc<dyn Fft<R>>,
    scratch: Vec<Complex<R>>,
    line: Vec<Complex<R>>,
}

impl<R: Real> Fourier<R> {
    pub fn new(grid: &TorusGrid<R>) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.points();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid: *grid,
            forward,
            inverse,
            scratch: vec![Complex::new(R::zero(), R::zero()); scratch_len],
            line: vec![Complex::new(R::zero(), R::zero()); n],
        }
    }

    pub fn grid(&self) -> &TorusGrid<R> {
        &self.grid
    }

    pub fn forward(&mut self, data: &mut [Complex<R>]) {
        let plan = Arc::clone(&self.forward);
        self.transform(plan.as_ref(), data);
    }

    pub fn inverse(&mut self, data: &mut [Complex<R>]) {
        let plan = Arc::clone(&self.inverse);
        self.transform(plan.as_ref(), data);
        let scale = R::one() / R::lit(self.grid.len() as f64);
        for z in data.iter_mut() {
            *z = *z * scale;
        }
    }

    fn transform(&mut self, plan: &dyn Fft<R>, data: &mut [Complex<R>]) {
        let n = self.grid.points();
        let dim = self.grid.dim();
        assert_eq!(
            data.len(),
            self.grid.len(),
            "buffer length does not match grid"
        );
        // Last axis is contiguous: rustfft handles consecutive chunks in one call.
        plan.process_with_scratch(data, &mut self.scratch);
        for axis in 0..dim - 1 {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, slot) in self.line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    plan.process_with_scratch(&mut self.line, &mut self.scratch);
                    for (i, &v) in self.line.iter().enumerate() {
                        data[base + i * stride] = v;
                    }
                }
            }
        }
    }

    pub fn to_spectrum(&mut self, f: &ComplexField<R>) -> Result<ComplexField<R>> {
        self.grid.ensure_same(f.grid(), "forward transform")?;
        let mut values = f.values().to_vec();
        self.forward(&mut values);
        Ok(ComplexField::from_raw(self.grid, values))
    }

    pub fn from_spectrum(&mut self, spec: &ComplexField<R>) -> Result<ComplexField<R>> {
        self.grid.ensure_same(spec.grid(), "inverse transform")?;
        let mut values = spec.values().to_vec();
        self.inverse(&mut values);
        Ok(ComplexField::from_raw(self.grid, values))
    }
}

/// Precomputed per-mode wavenumber data used by the time steppers.
#[derive(Clone, Debug)]
pub struct SpectralTables<R> {
    /// `|xi|^2` per flat spectral index.
    pub k2: Vec<R>,
    /// Per axis, the derivative wavenumber with the Nyquist mode zeroed.
    pub deriv: Vec<Vec<R>>,
    /// 2/3-rule mask (1 kept, 0 removed).
    pub dealias: Vec<R>,
}

impl<R: Real> SpectralTables<R> {
    pub fn new(grid: &TorusGrid<R>) -> Self {
        let len = grid.len();
        let n = grid.points();
        let mut k2 = Vec::with_capacity(len);
        let mut deriv = vec![Vec::with_capacity(len); grid.dim()];
        let mut dealias = Vec::with_capacity(len);
        for flat in 0..len {
            let xi = grid.wavevector(flat);
            k2.push(norm_sq3(xi));
            let idx = grid.multi_index(flat);
            let mut keep = true;
            for axis in 0..grid.dim() {
                let nyquist = idx[axis] == n / 2;
                deriv[axis].push(if nyquist { R::zero() } else { xi[axis] });
                if 3 * grid.wrap(idx[axis]).unsigned_abs() > n {
                    keep = false;
                }
            }
            dealias.push(if keep { R::one() } else { R::zero() });
        }
        Self { k2, deriv, dealias }
    }
}

/// Spectrum of `f` (unnormalized forward DFT).
pub fn to_spectrum<R: Real>(f: &ComplexField<R>) -> ComplexField<R> {
    Fourier::new(f.grid())
        .to_spectrum(f)
        .expect("grid matches its own plan")
}

/// Inverse of [`to_spectrum`].
pub fn from_spectrum<R: Real>(spec: &ComplexField<R>) -> ComplexField<R> {
    Fourier::new(spec.grid())
        .from_spectrum(spec)
        .expect("grid matches its own plan")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: TorusGrid<f64>, seed: u64) -> ComplexField<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexField::from_values(grid, values).unwrap()
    }

    #[test]
    fn constant_field_has_single_zero_mode() {
        let g = TorusGrid::<f64>::new(2, 16, 3.0).unwrap();
        let spec = to_spectrum(&ComplexField::constant(g, Complex::new(1.0, 0.0)));
        assert!((spec.values()[0] - Complex::new(256.0, 0.0)).norm() < 1e-12);
        assert!(spec.values()[1..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn plane_wave_is_single_mode() {
        let g = TorusGrid::<f64>::new(3, 8, 5.0).unwrap();
        let f = ComplexField::plane_wave(g, [1, -2, 3], Complex::new(1.0, 0.0));
        let spec = to_spectrum(&f);
        let target = g.flat_index([1, 6, 3]);
        for (i, z) in spec.values().iter().enumerate() {
            if i == target {
                assert!((z.norm() - 512.0).abs() < 1e-9);
            } else {
                assert!(z.norm() < 1e-9, "mode {i} = {z}");
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for (dim, n) in [(1, 256), (2, 128), (3, 32)] {
            let g = TorusGrid::<f64>::new(dim, n, 7.0).unwrap();
            let f = random_field(g, 11 + dim as u64);
            let spec = to_spectrum(&f);
            let back = from_spectrum(&spec);
            let err = back.sub(&f).unwrap().l2_sum() / f.l2_sum();
            assert!(err < 1e-12, "round trip error {err} for d={dim}");
            let phys: f64 = f.values().iter().map(|z| z.norm_sqr()).sum();
            let freq: f64 =
                spec.values().iter().map(|z| z.norm_sqr()).sum::<f64>() / g.len() as f64;
            assert!(((phys - freq) / phys).abs() < 1e-12);
        }
    }

    #[test]
    fn dealias_mask_keeps_low_modes() {
        let g = TorusGrid::<f64>::new(1, 16, 1.0).unwrap();
        let t = SpectralTables::new(&g);
        let kept: usize = t.dealias.iter().filter(|&&m| m > 0.0).count();
        // |m| <= 5 for n = 16
        assert_eq!(kept, 11);
    }
}
