use serde::{Deserialize, Serialize};

use super::problem::{ProblemSpec, SolverConfig};
use super::random_pde::solve_random_pde;
use super::solve::solve_spde;
use crate::error::{Error, Result};
use crate::noise::{BrownianDriver, DrivingPath};
use crate::observables::mass;
use crate::real::Real;
use crate::rescaling::{forward_phase, gauge};

/// Deviation between the gauged transformed solution and the SPDE solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// `(dt, deviation)` from coarsest to finest.
    pub levels: Vec<(f64, f64)>,
    /// Deviation at the finest step.
    pub deviation: f64,
    /// Least-squares slope of `log deviation` against `log dt`.
    pub order: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_order(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Deviation `max_t |e^{φ_σ(t)} v_σ(t) - X(σ + t)|_2 / |X_0|_2` at one step size.
pub fn equivalence_deviation<R: Real>(
    problem: &ProblemSpec<R>,
    driver: &BrownianDriver,
    sigma_index: usize,
    config: &SolverConfig,
) -> Result<f64> {
    let noise = problem
        .noise()
        .ok_or_else(|| Error::Config("equivalence check needs a noise model".into()))?;
    let factor = crate::noise::integer_ratio(config.dt, driver.mesh().dt()).ok_or_else(|| {
        Error::MeshMismatch("solver dt must be a multiple of the driver step".into())
    })?;
    let path = driver.coarsen(factor)?;
    let config = SolverConfig {
        store_stride: 1,
        ..config.clone()
    };
    let x = solve_spde(problem, &path, &config)?;
    if !x.is_complete() {
        return Err(Error::Domain(format!(
            "stochastic solve stopped early: {:?}",
            x.status
        )));
    }
    let start = x
        .series
        .fields()
        .get(sigma_index)
        .ok_or_else(|| Error::Domain(format!("start index {sigma_index} beyond the run")))?
        .clone();
    let phase = forward_phase(noise, &path, sigma_index)?;
    let shifted = problem.clone().with_initial(start)?;
    let v = solve_random_pde(&shifted, &phase, &config)?;
    if !v.is_complete() {
        return Err(Error::Domain(format!(
            "transformed solve stopped early: {:?}",
            v.status
        )));
    }
    let scale = mass(problem.initial()).sqrt();
    let mut worst = R::zero();
    for (i, vi) in v.series.fields().iter().enumerate() {
        let back = gauge(vi, &phase.field(i), 1)?;
        let gap = mass(&back.sub(&x.series.fields()[sigma_index + i])?).sqrt();
        worst = worst.max(gap / scale);
    }
    Ok(worst.as_f64())
}

/// Runs [`equivalence_deviation`] at `dt, dt/2, ...` (`levels` values) on one Brownian path.
///
/// `sigma_index` counts steps of the coarsest level. Dealiasing is switched off because the
/// mask does not commute with multiplication by `e^φ`.
pub fn rescaling_equivalence<R: Real>(
    problem: &ProblemSpec<R>,
    driver: &BrownianDriver,
    sigma_index: usize,
    config: &SolverConfig,
    levels: usize,
) -> Result<EquivalenceReport> {
    if levels < 2 {
        return Err(Error::Config(
            "an order fit needs at least two levels".into(),
        ));
    }
    let mut out = Vec::with_capacity(levels);
    for l in 0..levels {
        let refine = 1usize << l;
        let cfg = SolverConfig {
            dt: config.dt / refine as f64,
            dealias: Some(false),
            ..config.clone()
        };
        let dev = equivalence_deviation(problem, driver, sigma_index * refine, &cfg)?;
        out.push((cfg.dt, dev));
    }
    Ok(EquivalenceReport {
        deviation: out[levels - 1].1,
        order: fitted_order(&out),
        levels: out,
    })
}
