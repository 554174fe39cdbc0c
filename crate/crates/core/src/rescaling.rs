//! Phase fields, the gauge `v = e^{-φ} X` and the lower-order coefficients
//! of the transformed equation.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{integer_ratio, DrivingPath, NoiseModel, TimeMesh};
use crate::real::Real;
use crate::spectral::{gradient, laplacian, ComplexField, SpaceTimeSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    /// Accumulated from a start time, zero there.
    Forward,
    /// Accumulated backwards from the horizon, zero there.
    Scattering,
}

/// A phase `φ(t_j, ·)` on a mesh, stored through its coordinates in the basis
/// of noise profiles and compensator profiles; fields are materialized on demand.
#[derive(Clone, Debug)]
pub struct PhasePath<'m, R: Real> {
    model: &'m NoiseModel<R>,
    mesh: TimeMesh,
    kind: PhaseKind,
    /// `coeffs[j * 2N ..][..2N]` for `j = 0..=steps`.
    coeffs: Vec<f64>,
}

/// `b = 2∇φ` and `c = Δφ + Σ_j (∂_j φ)^2` at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerOrderCoeffs<R> {
    pub b: Vec<ComplexField<R>>,
    pub c: ComplexField<R>,
}

impl<'m, R: Real> PhasePath<'m, R> {
    pub fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    pub fn kind(&self) -> PhaseKind {
        self.kind
    }

    pub fn model(&self) -> &'m NoiseModel<R> {
        self.model
    }

    pub fn len(&self) -> usize {
        self.mesh.steps() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Basis coordinates at mesh index `j`.
    pub fn coefficients(&self, j: usize) -> &[f64] {
        let w = 2 * self.model.channels();
        &self.coeffs[j * w..(j + 1) * w]
    }

    pub fn field(&self, j: usize) -> ComplexField<R> {
        self.model.combine(self.coefficients(j))
    }

    pub fn gradient(&self, j: usize) -> Vec<ComplexField<R>> {
        self.model.combine_gradient(self.coefficients(j))
    }

    pub fn laplacian(&self, j: usize) -> ComplexField<R> {
        self.model.combine_laplacian(self.coefficients(j))
    }

    /// Lower-order coefficients at mesh index `j`.
    pub fn lower_order(&self, j: usize) -> LowerOrderCoeffs<R> {
        lower_order_from(self.gradient(j), self.laplacian(j))
    }

    /// Materialized phase snapshots at every `stride`-th mesh time (and the last one).
    pub fn series(&self, stride: usize) -> Result<SpaceTimeSeries<R>> {
        let stride = stride.max(1);
        let mut idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        if *idx.last().expect("non-empty") != self.mesh.steps() {
            idx.push(self.mesh.steps());
        }
        SpaceTimeSeries::new(
            idx.iter().map(|&j| R::lit(self.mesh.time(j))).collect(),
            idx.iter().map(|&j| self.field(j)).collect(),
        )
    }
}

fn lower_order_from<R: Real>(
    grad: Vec<ComplexField<R>>,
    lap: ComplexField<R>,
) -> LowerOrderCoeffs<R> {
    let mut c = lap;
    for g in &grad {
        for (o, z) in c.values_mut().iter_mut().zip(g.values()) {
            *o = *o + z * z;
        }
    }
    let two = Complex::new(R::lit(2.0), R::zero());
    let b = grad.iter().map(|g| g.scale(two)).collect();
    LowerOrderCoeffs { b, c }
}

fn check_path<R: Real, P: DrivingPath>(noise: &NoiseModel<R>, path: &P) -> Result<()> {
    if path.channels() != noise.channels() {
        return Err(Error::MeshMismatch(format!(
            "driver has {} channels, noise model {}",
            path.channels(),
            noise.channels()
        )));
    }
    Ok(())
}

/// Phase accumulated from mesh index `sigma_index`:
/// `φ_σ(t) = Σ_k ∫_σ^{σ+t} G_k dβ_k - ∫_σ^{σ+t} μ̂ ds`, left-point in the noise, trapezoid in `μ̂`.
pub fn forward_phase<'m, R: Real, P: DrivingPath>(
    noise: &'m NoiseModel<R>,
    driver: &P,
    sigma_index: usize,
) -> Result<PhasePath<'m, R>> {
    check_path(noise, driver)?;
    let full = *driver.mesh();
    if sigma_index >= full.steps() {
        return Err(Error::Domain(format!(
            "start index {sigma_index} must be below the {} mesh steps",
            full.steps()
        )));
    }
    let mesh = TimeMesh::new(
        full.time(sigma_index),
        full.dt(),
        full.steps() - sigma_index,
    )?;
    let w = 2 * noise.channels();
    let mut coeffs = vec![0.0; (mesh.steps() + 1) * w];
    for i in 0..mesh.steps() {
        let j = sigma_index + i;
        let step = noise.step_coefficients(full.time(j), full.dt(), &driver.increments_at(j));
        for (c, s) in (0..w).zip(step) {
            coeffs[(i + 1) * w + c] = coeffs[i * w + c] + s;
        }
    }
    Ok(PhasePath {
        model: noise,
        mesh,
        kind: PhaseKind::Forward,
        coeffs,
    })
}

/// Scattering phase `φ*(t) = -Σ_k ∫_t^{T} G_k dβ_k + ∫_t^{T} μ̂ ds`, zero at the horizon `T`.
///
/// Every amplitude must vanish after `horizon`, so truncating the tail there is exact.
pub fn scattering_phase<'m, R: Real, P: DrivingPath>(
    noise: &'m NoiseModel<R>,
    driver: &P,
    horizon: f64,
) -> Result<PhasePath<'m, R>> {
    check_path(noise, driver)?;
    let full = *driver.mesh();
    match noise.support_end() {
        Some(end) if end <= horizon + 1e-12 * horizon.abs().max(1.0) => {}
        Some(end) => {
            return Err(Error::Domain(format!(
                "noise amplitudes are nonzero up to t = {end}, beyond the horizon {horizon}"
            )))
        }
        None => {
            return Err(Error::Domain(
                "scattering phase needs amplitudes with compact support in time".into(),
            ))
        }
    }
    let steps = integer_ratio(horizon - full.t0(), full.dt())
        .filter(|s| *s <= full.steps())
        .ok_or_else(|| {
            Error::Domain(format!(
                "horizon {horizon} is not a mesh time of the driver"
            ))
        })?;
    let mesh = TimeMesh::new(full.t0(), full.dt(), steps)?;
    let w = 2 * noise.channels();
    let mut coeffs = vec![0.0; (steps + 1) * w];
    for j in (0..steps).rev() {
        let step = noise.step_coefficients(full.time(j), full.dt(), &driver.increments_at(j));
        for (c, s) in (0..w).zip(step) {
            coeffs[j * w + c] = coeffs[(j + 1) * w + c] - s;
        }
    }
    Ok(PhasePath {
        model: noise,
        mesh,
        kind: PhaseKind::Scattering,
        coeffs,
    })
}

/// Coefficients at every mesh time of a phase path.
pub fn coeffs_from_phase<R: Real>(phase: &PhasePath<'_, R>) -> Vec<LowerOrderCoeffs<R>> {
    (0..phase.len()).map(|j| phase.lower_order(j)).collect()
}

/// Coefficients of an arbitrary phase field using spectral derivatives.
pub fn coeffs_from_field<R: Real>(phi: &ComplexField<R>) -> LowerOrderCoeffs<R> {
    lower_order_from(gradient(phi), laplacian(phi))
}

/// Pointwise `e^{direction φ} f`; fails when the exponent would overflow.
pub fn gauge<R: Real>(
    f: &ComplexField<R>,
    phase: &ComplexField<R>,
    direction: i8,
) -> Result<ComplexField<R>> {
    f.grid().ensure_same(phase.grid(), "gauge")?;
    let s = if direction >= 0 { R::one() } else { -R::one() };
    let max_re = phase
        .values()
        .iter()
        .fold(R::neg_infinity(), |m, z| m.max(s * z.re));
    if max_re > R::exp_ceiling() {
        return Err(Error::Overflow {
            max_re: max_re.as_f64(),
        });
    }
    let values = f
        .values()
        .iter()
        .zip(phase.values())
        .map(|(v, p)| v * (p * s).exp())
        .collect();
    ComplexField::from_values(*f.grid(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{
        make_bump_profile, sample_driver, NoiseChannel, NoiseProfile, TimeAmplitude,
    };
    use crate::spectral::TorusGrid;

    fn model(conservative: bool) -> NoiseModel<f64> {
        let grid = TorusGrid::new(1, 128, 16.0).unwrap();
        let amps = if conservative {
            [Complex::new(0.0, 0.8), Complex::new(0.0, -0.5)]
        } else {
            [Complex::new(0.3, 0.8), Complex::new(-0.4, 0.2)]
        };
        let channels = amps
            .iter()
            .zip([-1.0, 1.5])
            .map(|(a, c)| NoiseChannel {
                profile: make_bump_profile(&grid, &[c], 3.0, *a, conservative).unwrap(),
                amplitude: TimeAmplitude::SmoothPulse {
                    amplitude: 1.2,
                    start: 0.0,
                    end: 1.0,
                },
            })
            .collect();
        NoiseModel::new(channels).unwrap()
    }

    fn mesh() -> TimeMesh {
        TimeMesh::covering(1.0, 1.0 / 64.0).unwrap()
    }

    #[test]
    fn forward_phase_starts_at_zero_and_is_additive() {
        let m = model(false);
        let d = sample_driver(mesh(), 2, 1, 0).unwrap();
        let full = forward_phase(&m, &d, 0).unwrap();
        assert!(full.field(0).values().iter().all(|z| z.norm() == 0.0));
        for sigma in [5, 17, 40] {
            let part = forward_phase(&m, &d, sigma).unwrap();
            assert!(part.field(0).values().iter().all(|z| z.norm() == 0.0));
            for i in 0..part.len() {
                let lhs = full.field(sigma + i).sub(&full.field(sigma)).unwrap();
                let gap = lhs.sub(&part.field(i)).unwrap().max_abs();
                assert!(gap <= 1e-12, "sigma {sigma}, i {i}: {gap}");
            }
        }
    }

    #[test]
    fn phase_matches_direct_accumulation() {
        let m = model(false);
        let d = sample_driver(mesh(), 2, 3, 1).unwrap();
        let p = forward_phase(&m, &d, 0).unwrap();
        let mut direct = ComplexField::zeros(*m.grid());
        let dt = mesh().dt();
        for j in 0..mesh().steps() {
            let t = mesh().time(j);
            for k in 0..2 {
                direct
                    .axpy(Complex::new(d.increment(j, k), 0.0), &m.field(k, t))
                    .unwrap();
            }
            let mh = m.mu_hat(t).add(&m.mu_hat(t + dt)).unwrap();
            direct.axpy(Complex::new(-0.5 * dt, 0.0), &mh).unwrap();
        }
        assert!(direct.sub(&p.field(64)).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn conservative_phase_is_imaginary() {
        let m = model(true);
        let d = sample_driver(mesh(), 2, 4, 2).unwrap();
        let p = forward_phase(&m, &d, 0).unwrap();
        for j in 0..p.len() {
            assert!(p.field(j).values().iter().all(|z| z.re.abs() <= 1e-12));
        }
    }

    #[test]
    fn scattering_phase_tail_identity() {
        let m = model(false);
        let d = sample_driver(mesh(), 2, 5, 3).unwrap();
        let star = scattering_phase(&m, &d, 1.0).unwrap();
        let fwd = forward_phase(&m, &d, 0).unwrap();
        assert!(star.field(64).values().iter().all(|z| z.norm() == 0.0));
        let base = star.field(0);
        for j in 0..=64 {
            let lhs = star.field(j).sub(&base).unwrap();
            let gap = lhs.sub(&fwd.field(j)).unwrap().max_abs();
            assert!(gap < 1e-12, "{j}: {gap}");
        }
    }

    #[test]
    fn scattering_phase_rejects_long_amplitudes() {
        let grid = TorusGrid::new(1, 64, 16.0).unwrap();
        let ch = |amplitude| NoiseChannel {
            profile: make_bump_profile(&grid, &[0.0], 3.0, Complex::new(0.0, 1.0), true).unwrap(),
            amplitude,
        };
        let m = NoiseModel::new(vec![ch(TimeAmplitude::Constant { value: 1.0 })]).unwrap();
        let d = sample_driver(mesh(), 1, 0, 0).unwrap();
        assert!(matches!(
            scattering_phase(&m, &d, 1.0),
            Err(Error::Domain(_))
        ));
        let m = NoiseModel::new(vec![ch(TimeAmplitude::SmoothPulse {
            amplitude: 1.0,
            start: 0.0,
            end: 1.5,
        })])
        .unwrap();
        assert!(scattering_phase(&m, &d, 1.0).is_err());
        let m = NoiseModel::new(vec![ch(TimeAmplitude::Constant { value: 0.0 })]).unwrap();
        let p = scattering_phase(&m, &d, 0.5).unwrap();
        assert!(p.field(0).max_abs() == 0.0);
    }

    #[test]
    fn sine_phase_coefficients() {
        let grid = TorusGrid::<f64>::new(1, 64, 8.0).unwrap();
        let w = 2.0 * std::f64::consts::PI / 8.0;
        let phi = ComplexField::from_fn(grid, |x| Complex::new((w * x[0]).sin(), 0.0));
        let c = coeffs_from_field(&phi);
        for i in 0..64 {
            let x = grid.coordinate(i);
            assert!((c.b[0].values()[i].re - 2.0 * w * (w * x).cos()).abs() < 1e-12);
            let expect = -w * w * (w * x).sin() + (w * (w * x).cos()).powi(2);
            assert!((c.c.values()[i].re - expect).abs() < 1e-12);
        }
        let zero = coeffs_from_field(&ComplexField::zeros(grid));
        assert_eq!(zero.c.max_abs(), 0.0);
        assert_eq!(zero.b[0].max_abs(), 0.0);
        // a spectral profile gives the same coefficients through the basis
        let m = NoiseModel::new_unchecked(vec![NoiseChannel {
            profile: NoiseProfile::from_field(phi.clone()).unwrap(),
            amplitude: TimeAmplitude::Constant { value: 1.0 },
        }])
        .unwrap();
        let via = lower_order_from(
            m.combine_gradient(&[1.0, 0.0]),
            m.combine_laplacian(&[1.0, 0.0]),
        );
        assert!(via.c.sub(&c.c).unwrap().max_abs() < 1e-10);
        assert!(via.b[0].sub(&c.b[0]).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn coefficients_vanish_off_support() {
        let m = model(false);
        let d = sample_driver(mesh(), 2, 6, 0).unwrap();
        let p = forward_phase(&m, &d, 0).unwrap();
        let lo = p.lower_order(40);
        let grid = m.grid();
        for i in 0..grid.len() {
            let x = grid.coordinate(i);
            if !((x + 1.0).abs() < 3.0 || (x - 1.5).abs() < 3.0) {
                assert_eq!(lo.c.values()[i], Complex::new(0.0, 0.0));
                assert_eq!(lo.b[0].values()[i], Complex::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn random_phase_against_finite_differences() {
        // FD oracle for b and c of a non-conservative random phase
        let err = |n: usize| {
            let grid = TorusGrid::<f64>::new(1, n, 16.0).unwrap();
            let ch = |a: Complex<f64>, c: f64| NoiseChannel {
                profile: make_bump_profile(&grid, &[c], 5.0, a, false).unwrap(),
                amplitude: TimeAmplitude::Constant { value: 1.0 },
            };
            let m = NoiseModel::new(vec![
                ch(Complex::new(0.3, 0.7), -1.0),
                ch(Complex::new(-0.2, 0.4), 1.0),
            ])
            .unwrap();
            let d = sample_driver(TimeMesh::covering(1.0, 0.125).unwrap(), 2, 8, 0).unwrap();
            let p = forward_phase(&m, &d, 0).unwrap();
            let phi = p.field(8);
            let lo = p.lower_order(8);
            let v = phi.values();
            let h = grid.spacing();
            let at = |i: usize, o: isize| v[(i as isize + o).rem_euclid(n as isize) as usize];
            let mut e: f64 = 0.0;
            for i in 0..n {
                let d1 = (-at(i, 2) + at(i, 1) * 8.0 - at(i, -1) * 8.0 + at(i, -2)) / (12.0 * h);
                let d2 = (-at(i, 2) + at(i, 1) * 16.0 - at(i, 0) * 30.0 + at(i, -1) * 16.0
                    - at(i, -2))
                    / (12.0 * h * h);
                e = e.max((d1 * 2.0 - lo.b[0].values()[i]).norm());
                e = e.max((d2 + d1 * d1 - lo.c.values()[i]).norm());
            }
            e
        };
        let e = [err(512), err(1024), err(2048)];
        assert!(e[0] / e[1] > 12.0 && e[1] / e[2] > 12.0, "{e:?}");
    }

    #[test]
    fn gauge_round_trip_and_modulus() {
        let grid = TorusGrid::<f64>::new(2, 16, 8.0).unwrap();
        let f = ComplexField::from_fn(grid, |x| Complex::new(x[0].cos(), x[1]));
        let imag = ComplexField::from_fn(grid, |x| Complex::new(0.0, x[0] * x[1]));
        let general = ComplexField::from_fn(grid, |x| Complex::new(0.3 * x[0], x[1]));
        let g = gauge(&f, &imag, 1).unwrap();
        for (a, b) in g.values().iter().zip(f.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-13);
        }
        let back = gauge(&gauge(&f, &general, 1).unwrap(), &general, -1).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() <= 1e-13 * f.max_abs());
        assert_eq!(gauge(&f, &ComplexField::zeros(grid), 1).unwrap(), f);
        let huge = ComplexField::constant(grid, Complex::new(800.0, 0.0));
        assert!(matches!(gauge(&f, &huge, 1), Err(Error::Overflow { .. })));
        assert!(gauge(&f, &huge, -1).is_ok());
    }
}
