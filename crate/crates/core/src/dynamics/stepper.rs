use num_complex::Complex;

use crate::real::Real;
use crate::spectral::{Fourier, SpectralTables, TorusGrid};

/// Per-solver workspace: FFT plans, wavenumber tables and cached propagators.
pub(crate) struct Stepper<R: Real> {
    fourier: Fourier<R>,
    tables: SpectralTables<R>,
    dim: usize,
    dealias: bool,
    propagators: Vec<(R, Vec<Complex<R>>)>,
    scratch: Vec<Complex<R>>,
}

impl<R: Real> Stepper<R> {
    pub fn new(grid: &TorusGrid<R>, dealias: bool) -> Self {
        Self {
            fourier: Fourier::new(grid),
            tables: SpectralTables::new(grid),
            dim: grid.dim(),
            dealias,
            propagators: Vec::new(),
            scratch: vec![Complex::new(R::zero(), R::zero()); grid.len()],
        }
    }

    fn propagator(&mut self, dt: R) -> usize {
        if let Some(i) = self.propagators.iter().position(|(t, _)| *t == dt) {
            return i;
        }
        let symbol = self
            .tables
            .k2
            .iter()
            .zip(&self.tables.dealias)
            .map(|(&k2, &mask)| {
                let phase = dt * k2;
                let keep = if self.dealias { mask } else { R::one() };
                Complex::new(phase.cos() * keep, phase.sin() * keep)
            })
            .collect();
        self.propagators.push((dt, symbol));
        self.propagators.len() - 1
    }

    /// Exact free flow `i u_t = Δu` over `dt` (masked when dealiasing).
    pub fn linear(&mut self, v: &mut [Complex<R>], dt: R) {
        let p = self.propagator(dt);
        self.fourier.forward(v);
        for (z, m) in v.iter_mut().zip(&self.propagators[p].1) {
            *z = *z * m;
        }
        self.fourier.inverse(v);
    }

    /// Pointwise exact flow of `i u_t = λ w |u|^{α-1} u`.
    pub fn nonlinear(
        &self,
        v: &mut [Complex<R>],
        dt: R,
        lambda: R,
        alpha: R,
        weight: Option<&[R]>,
    ) {
        let half = (alpha - R::one()) / R::lit(2.0);
        let rate = -lambda * dt;
        for (i, z) in v.iter_mut().enumerate() {
            let m = z.norm_sqr();
            if m == R::zero() {
                continue;
            }
            let mut theta = rate * m.powf(half);
            if let Some(w) = weight {
                theta = theta * w[i];
            }
            *z = *z * Complex::new(theta.cos(), theta.sin());
        }
    }

    /// `out = -i (b·∇u + c u)`.
    fn perturbation(
        &mut self,
        u: &[Complex<R>],
        b: &[&[Complex<R>]],
        c: &[Complex<R>],
        out: &mut [Complex<R>],
    ) {
        let minus_i = Complex::new(R::zero(), -R::one());
        for ((o, z), cc) in out.iter_mut().zip(u).zip(c) {
            *o = cc * z;
        }
        self.scratch.copy_from_slice(u);
        self.fourier.forward(&mut self.scratch);
        let spec = self.scratch.clone();
        for (axis, b_axis) in b.iter().enumerate().take(self.dim) {
            let deriv = &self.tables.deriv[axis];
            for ((s, z), k) in self.scratch.iter_mut().zip(&spec).zip(deriv) {
                *s = z * Complex::new(R::zero(), *k);
            }
            self.fourier.inverse(&mut self.scratch);
            for ((o, g), bb) in out.iter_mut().zip(&self.scratch).zip(b_axis.iter()) {
                *o = *o + bb * g;
            }
        }
        for o in out.iter_mut() {
            *o = *o * minus_i;
        }
    }

    /// One interaction-picture RK4 step of `i u_t = Δu + b·∇u + c u` with frozen `b`, `c`.
    pub fn linear_perturbed(
        &mut self,
        v: &mut [Complex<R>],
        dt: R,
        b: &[&[Complex<R>]],
        c: &[Complex<R>],
    ) {
        let n = v.len();
        let half = dt / R::lit(2.0);
        let zero = Complex::new(R::zero(), R::zero());
        let h = Complex::new(dt, R::zero());
        let h2 = Complex::new(half, R::zero());
        let sixth = Complex::new(dt / R::lit(6.0), R::zero());
        let two = Complex::new(R::lit(2.0), R::zero());

        let mut vi = v.to_vec();
        self.linear(&mut vi, half);
        let mut k1 = vec![zero; n];
        self.perturbation(v, b, c, &mut k1);
        self.linear(&mut k1, half);

        let mut tmp: Vec<_> = vi.iter().zip(&k1).map(|(a, k)| a + h2 * k).collect();
        let mut k2 = vec![zero; n];
        self.perturbation(&tmp, b, c, &mut k2);

        for ((t, a), k) in tmp.iter_mut().zip(&vi).zip(&k2) {
            *t = a + h2 * k;
        }
        let mut k3 = vec![zero; n];
        self.perturbation(&tmp, b, c, &mut k3);

        for ((t, a), k) in tmp.iter_mut().zip(&vi).zip(&k3) {
            *t = a + h * k;
        }
        self.linear(&mut tmp, half);
        let mut k4 = vec![zero; n];
        self.perturbation(&tmp, b, c, &mut k4);

        for (i, out) in v.iter_mut().enumerate() {
            *out = vi[i] + sixth * (k1[i] + two * k2[i] + two * k3[i]);
        }
        self.linear(v, half);
        for (out, k) in v.iter_mut().zip(&k4) {
            *out = *out + sixth * k;
        }
    }
}
