#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use snls::spectral::norms::{power_product, v_exponent, w_exponents};
use snls::spectral::{gradient, mixed_spacetime_norm, ComplexField, SpaceTimeSeries, TorusGrid};

type C = Complex<f64>;

/// Band-limited series `sum_k a_k cos(w_k t + p_k) e^{i k.x}` that can be sampled on any grid and time step.
#[derive(Clone, Debug)]
pub struct SmoothSeries {
    dim: usize,
    length: f64,
    modes: Vec<([isize; 3], C, f64, f64)>,
    envelope: f64,
}

impl SmoothSeries {
    pub fn random(dim: usize, length: f64, rng: &mut ChaCha8Rng) -> Self {
        let count = rng.random_range(1..=5);
        let modes = (0..count)
            .map(|_| {
                let mut k = [0isize; 3];
                for m in k.iter_mut().take(dim) {
                    *m = rng.random_range(-3i64..=3) as isize;
                }
                let a = C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (
                    k,
                    a,
                    rng.random_range(0.5..4.0),
                    rng.random_range(0.0..2.0 * PI),
                )
            })
            .collect();
        Self {
            dim,
            length,
            modes,
            envelope: rng.random_range(0.2..1.0),
        }
    }

    pub fn eval(&self, t: f64, x: [f64; 3]) -> C {
        // Gaussian envelope keeps |u| non-constant in space so the inequalities are not tight.
        let r2: f64 = x.iter().take(self.dim).map(|v| v * v).sum();
        let env = (-self.envelope * r2 / self.length).exp();
        let k0 = 2.0 * PI / self.length;
        self.modes
            .iter()
            .map(|(k, a, w, p)| {
                let phase = k0 * (0..self.dim).map(|i| k[i] as f64 * x[i]).sum::<f64>();
                a * (w * t + p).cos() * C::new(phase.cos(), phase.sin())
            })
            .sum::<C>()
            * env
    }

    pub fn sample(&self, points: usize, horizon: f64, steps: usize) -> SpaceTimeSeries<f64> {
        let grid = TorusGrid::new(self.dim, points, self.length).unwrap();
        let times: Vec<f64> = (0..=steps)
            .map(|j| horizon * j as f64 / steps as f64)
            .collect();
        let fields = times
            .iter()
            .map(|&t| ComplexField::from_fn(grid, |x| self.eval(t, x)))
            .collect();
        SpaceTimeSeries::new(times, fields).unwrap()
    }
}

pub fn ratio_check(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

/// `|| |u|^{4/d} v ||_{L^{(2d+4)/(d+4)}} / (||u||_V^{4/d} ||v||_V)`.
pub fn mass_critical_holder_ratio(u: &SpaceTimeSeries<f64>, v: &SpaceTimeSeries<f64>) -> f64 {
    let d = u.grid().unwrap().dim() as f64;
    let r = (2.0 * d + 4.0) / (d + 4.0);
    let product = SpaceTimeSeries::new(
        u.times().to_vec(),
        u.fields()
            .iter()
            .zip(v.fields())
            .map(|(a, b)| power_product(a, 4.0 / d, b).unwrap())
            .collect(),
    )
    .unwrap();
    let vexp = v_exponent(d as usize);
    let lhs = mixed_spacetime_norm(&product, r, r).unwrap();
    let rhs = mixed_spacetime_norm(u, vexp, vexp).unwrap().powf(4.0 / d)
        * mixed_spacetime_norm(v, vexp, vexp).unwrap();
    ratio_check(lhs, rhs)
}

/// `|| |u|^{4/(d-2)} v ||_{L^2 L^{2d/(d+2)}} / (||u||_{L^{2(d+2)/(d-2)}}^{4/(d-2)} ||v||_W)`.
pub fn energy_critical_holder_ratio(u: &SpaceTimeSeries<f64>, v: &SpaceTimeSeries<f64>) -> f64 {
    let d = u.grid().unwrap().dim() as f64;
    let power = 4.0 / (d - 2.0);
    let diag = 2.0 * (d + 2.0) / (d - 2.0);
    let (wq, wp) = w_exponents(d as usize).unwrap();
    let product = SpaceTimeSeries::new(
        u.times().to_vec(),
        u.fields()
            .iter()
            .zip(v.fields())
            .map(|(a, b)| power_product(a, power, b).unwrap())
            .collect(),
    )
    .unwrap();
    let lhs = mixed_spacetime_norm(&product, 2.0, 2.0 * d / (d + 2.0)).unwrap();
    let rhs = mixed_spacetime_norm(u, diag, diag).unwrap().powf(power)
        * mixed_spacetime_norm(v, wq, wp).unwrap();
    ratio_check(lhs, rhs)
}

/// `|| |u|^{(6-d)/(d-2)} v grad w ||_{L^2 L^{2d/(d+2)}}` against the diagonal norms of `u`, `v` and the `W` norm of
/// `|grad w|`.
pub fn gradient_holder_ratio(
    u: &SpaceTimeSeries<f64>,
    v: &SpaceTimeSeries<f64>,
    w: &SpaceTimeSeries<f64>,
) -> f64 {
    let d = u.grid().unwrap().dim() as f64;
    let power = (6.0 - d) / (d - 2.0);
    let diag = 2.0 * (d + 2.0) / (d - 2.0);
    let (wq, wp) = w_exponents(d as usize).unwrap();
    let grad_mag = w.map_fields(|f| {
        let g = gradient(f);
        let vals = (0..f.grid().len())
            .map(|i| {
                C::new(
                    g.iter()
                        .map(|c| c.values()[i].norm_sqr())
                        .sum::<f64>()
                        .sqrt(),
                    0.0,
                )
            })
            .collect();
        ComplexField::from_values(*f.grid(), vals).unwrap()
    });
    let product = SpaceTimeSeries::new(
        u.times().to_vec(),
        (0..u.len())
            .map(|j| {
                let uv = power_product(&u.fields()[j], power, &v.fields()[j]).unwrap();
                uv.mul(&grad_mag.fields()[j]).unwrap()
            })
            .collect(),
    )
    .unwrap();
    let lhs = mixed_spacetime_norm(&product, 2.0, 2.0 * d / (d + 2.0)).unwrap();
    let rhs = mixed_spacetime_norm(u, diag, diag).unwrap().powf(power)
        * mixed_spacetime_norm(v, diag, diag).unwrap()
        * mixed_spacetime_norm(&grad_mag, wq, wp).unwrap();
    ratio_check(lhs, rhs)
}
