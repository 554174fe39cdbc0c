use num_complex::Complex;

use crate::error::{domain, Result};
use crate::real::Real;
use crate::spectral::{gradient, laplacian, ComplexField, TorusGrid};

/// Spatial noise profile with its spectral gradient and Laplacian.
#[derive(Clone, Debug)]
pub struct NoiseProfile<R: Real> {
    phi: ComplexField<R>,
    grad: Vec<ComplexField<R>>,
    lap: ComplexField<R>,
}

impl<R: Real> NoiseProfile<R> {
    /// Profile from an arbitrary field; derivatives are computed spectrally.
    pub fn from_field(phi: ComplexField<R>) -> Result<Self> {
        if !phi.is_finite() {
            return domain("noise profile must be finite");
        }
        let grad = gradient(&phi);
        let lap = laplacian(&phi);
        Ok(Self { phi, grad, lap })
    }

    pub fn phi(&self) -> &ComplexField<R> {
        &self.phi
    }

    pub fn grad(&self) -> &[ComplexField<R>] {
        &self.grad
    }

    pub fn lap(&self) -> &ComplexField<R> {
        &self.lap
    }

    pub fn grid(&self) -> &TorusGrid<R> {
        self.phi.grid()
    }

    /// `Re(φ) φ` with derivatives from the product rule.
    pub(crate) fn re_times_self(&self) -> Self {
        let re = |f: &ComplexField<R>| f.real_part();
        let r = re(&self.phi);
        let phi = r.mul(&self.phi).expect("same grid");
        let grad_r: Vec<_> = self.grad.iter().map(re).collect();
        let grad = grad_r
            .iter()
            .zip(&self.grad)
            .map(|(gr, g)| {
                let mut out = gr.mul(&self.phi).expect("same grid");
                out.axpy(
                    Complex::new(R::one(), R::zero()),
                    &r.mul(g).expect("same grid"),
                )
                .expect("same grid");
                out
            })
            .collect();
        let mut lap = re(&self.lap).mul(&self.phi).expect("same grid");
        lap.axpy(
            Complex::new(R::one(), R::zero()),
            &r.mul(&self.lap).expect("same grid"),
        )
        .expect("same grid");
        for (gr, g) in grad_r.iter().zip(&self.grad) {
            lap.axpy(
                Complex::new(R::lit(2.0), R::zero()),
                &gr.mul(g).expect("same grid"),
            )
            .expect("same grid");
        }
        Self { phi, grad, lap }
    }

    pub(crate) fn cast<S: Real>(&self) -> Result<NoiseProfile<S>> {
        Ok(NoiseProfile {
            phi: self.phi.cast(),
            grad: self.grad.iter().map(|g| g.cast()).collect(),
            lap: self.lap.cast(),
        })
    }

    /// Largest gap between the stored gradient and the spectral gradient of `φ`,
    /// relative to the largest stored gradient entry.
    pub fn spectral_defect(&self) -> R {
        let spectral = gradient(&self.phi);
        let mut gap = R::zero();
        let mut scale = R::zero();
        for (s, g) in spectral.iter().zip(&self.grad) {
            for (a, b) in s.values().iter().zip(g.values()) {
                gap = gap.max((a - b).norm());
                scale = scale.max(b.norm());
            }
        }
        if scale > R::zero() {
            gap / scale
        } else {
            gap
        }
    }

    /// True when the real part vanishes identically.
    pub fn is_purely_imaginary(&self) -> bool {
        self.phi.values().iter().all(|z| z.re == R::zero())
    }

    /// `(shell max, global max)` of `|x|^2 |∇φ|`, the shell being `max_i |x_i| ≥ 0.9 L/2`.
    pub fn decay_proxy(&self) -> (R, R) {
        let grid = self.grid();
        let edge = R::lit(0.45) * grid.length();
        let mut shell = R::zero();
        let mut global = R::zero();
        for i in 0..grid.len() {
            let x = grid.position(i);
            let r2 = x.iter().fold(R::zero(), |a, v| a + *v * *v);
            let g2 = self
                .grad
                .iter()
                .fold(R::zero(), |a, f| a + f.values()[i].norm_sqr());
            let w = r2 * g2.sqrt();
            global = global.max(w);
            if x[..grid.dim()].iter().any(|v| v.abs() >= edge) {
                shell = shell.max(w);
            }
        }
        (shell, global)
    }
}

/// Smooth compactly supported bump `amplitude * exp(-r^2 / (radius^2 - r^2))`.
///
/// A conservative profile must have a purely imaginary amplitude.
pub fn make_bump_profile<R: Real>(
    grid: &TorusGrid<R>,
    center: &[R],
    radius: R,
    amplitude: Complex<R>,
    conservative: bool,
) -> Result<NoiseProfile<R>> {
    let d = grid.dim();
    if center.len() != d {
        return domain(format!(
            "bump center has {} coordinates for a {d}-dimensional grid",
            center.len()
        ));
    }
    if !(radius > R::zero()) || !amplitude.re.is_finite() || !amplitude.im.is_finite() {
        return domain("bump radius must be positive and amplitude finite");
    }
    let limit = grid.length() / R::lit(2.0) - R::lit(2.0) * grid.spacing();
    let reach = center.iter().fold(R::zero(), |a, c| a.max(c.abs())) + radius;
    if !(reach < limit) {
        return domain(format!(
            "bump of radius {radius} at offset {} does not fit in the box (limit {limit})",
            reach - radius
        ));
    }
    if conservative && amplitude.re != R::zero() {
        return domain("a conservative profile needs a purely imaginary amplitude");
    }
    // closed-form derivatives keep the support exact
    let r2max = radius * radius;
    let zero = Complex::new(R::zero(), R::zero());
    let n = grid.len();
    let mut phi = vec![zero; n];
    let mut grad = vec![vec![zero; n]; d];
    let mut lap = vec![zero; n];
    let two = R::lit(2.0);
    for i in 0..n {
        let x = grid.position(i);
        let mut y = [R::zero(); 3];
        for a in 0..d {
            y[a] = x[a] - center[a];
        }
        let r2 = y.iter().fold(R::zero(), |acc, v| acc + *v * *v);
        if r2 >= r2max {
            continue;
        }
        let q = r2max - r2;
        let value = amplitude * (-r2 / q).exp();
        if value == zero {
            continue;
        }
        phi[i] = value;
        let c = -two * r2max / (q * q);
        for a in 0..d {
            grad[a][i] = value * (c * y[a]);
        }
        let grad_s2 = c * c * r2;
        let lap_s = c * (R::lit(d as f64) + R::lit(4.0) * r2 / q);
        lap[i] = value * (grad_s2 + lap_s);
    }
    let phi = ComplexField::from_values(*grid, phi)?;
    let grad = grad
        .into_iter()
        .map(|g| ComplexField::from_values(*grid, g))
        .collect::<Result<Vec<_>>>()?;
    let lap = ComplexField::from_values(*grid, lap)?;
    Ok(NoiseProfile { phi, grad, lap })
}
