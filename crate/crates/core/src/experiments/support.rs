use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LevelStat;
use crate::dynamics::{
    solve_controlled, solve_spde, Criticality, ProblemSpec, SolverConfig, Trajectory,
};
use crate::error::{Error, Result};
use crate::noise::{
    integer_ratio, ito_integral, pathwise_integral, sample_driver, AdaptedInterpolation,
    CameronMartinControl, DrivingPath, IncrementPath, TimeMesh,
};
use crate::observables::{s0_norm, s1_norm};

/// Monte Carlo layout shared by the support and interpolation studies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportSetup {
    pub horizon: f64,
    /// Step of the sampled Brownian paths; every `2^-n` must be a multiple of it.
    pub driver_dt: f64,
    pub levels: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
}

impl SupportSetup {
    fn mesh(&self) -> Result<TimeMesh> {
        TimeMesh::covering(self.horizon, self.driver_dt)
    }

    fn check_levels(&self, mesh: &TimeMesh) -> Result<()> {
        for &n in &self.levels {
            if n == 0 || n > 52 || integer_ratio((-(n as f64)).exp2(), mesh.dt()).is_none() {
                return Err(Error::Domain(format!(
                    "dyadic cell 2^-{n} is not a multiple of dt = {}",
                    mesh.dt()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub levels: Vec<u32>,
    /// `S0` for mass-critical runs, `S1` for energy-critical ones.
    pub norm: String,
    /// `‖S(β^n) - X(β)‖` indexed `[level][sample]`.
    pub distances: Vec<Vec<f64>>,
    pub distance_stats: Vec<LevelStat>,
    /// `‖X(β^n - β + h) - S(h)‖` when a control was given.
    pub shifted_distances: Option<Vec<Vec<f64>>>,
    pub shifted_stats: Option<Vec<LevelStat>>,
    /// `E sup_t |∫ g dβ^n - ∫ g dβ|^2` summed over channels, per level.
    pub interpolation: Vec<LevelStat>,
    pub samples: usize,
}

fn complete(t: Trajectory<f64>, what: &str) -> Result<Trajectory<f64>> {
    if t.is_complete() {
        Ok(t)
    } else {
        Err(Error::Numerical(format!(
            "{what} stopped early: {:?}",
            t.status
        )))
    }
}

fn distance(criticality: Criticality, a: &Trajectory<f64>, b: &Trajectory<f64>) -> Result<f64> {
    let diff = a.series.difference(&b.series)?;
    match criticality {
        Criticality::Mass => Ok(s0_norm(&diff)?.0),
        Criticality::Energy => s1_norm(&diff),
    }
}

/// `sup_t |∫ g dβ^n - ∫ g dβ|^2` summed over channels.
fn interpolation_gap<P: DrivingPath>(
    g: &[Vec<f64>],
    driver: &P,
    interp: &AdaptedInterpolation,
) -> Result<f64> {
    let mut total = 0.0;
    for (k, gk) in g.iter().enumerate() {
        let ito = ito_integral(gk, driver, k)?;
        let smooth = pathwise_integral(gk, interp, k)?;
        total += ito
            .iter()
            .zip(&smooth)
            .map(|(a, b)| (a - b).powi(2))
            .fold(0.0, f64::max);
    }
    Ok(total)
}

struct SampleResult {
    distances: Vec<f64>,
    shifted: Vec<f64>,
    interpolation: Vec<f64>,
}

/// Compares the controlled equation driven by adapted interpolations `β^n` with the
/// stochastic equation driven by `β`, sample by sample, and optionally the stochastic
/// equation driven by `β^n - β + h` with the controlled equation driven by `h`.
pub fn support_comparison(
    problem: &ProblemSpec<f64>,
    config: &SolverConfig,
    setup: &SupportSetup,
    control: Option<&CameronMartinControl>,
) -> Result<SupportReport> {
    let noise = problem
        .noise()
        .ok_or_else(|| Error::Config("the support comparison needs a noise model".into()))?;
    let mesh = setup.mesh()?;
    setup.check_levels(&mesh)?;
    if let Some(h) = control {
        mesh.ensure_same(h.mesh(), "control")?;
        if h.channels() != noise.channels() {
            return Err(Error::MeshMismatch(
                "control and noise model channel counts differ".into(),
            ));
        }
    }
    let g: Vec<Vec<f64>> = (0..noise.channels())
        .map(|k| mesh.times().iter().map(|&t| noise.g(k, t)).collect())
        .collect();
    let criticality = problem.criticality();
    let reference = match control {
        Some(h) => Some(complete(
            solve_controlled(problem, h, config)?,
            "controlled solve S(h)",
        )?),
        None => None,
    };
    let results = (0..setup.samples)
        .into_par_iter()
        .map(|s| -> Result<SampleResult> {
            let driver = sample_driver(mesh, noise.channels(), setup.seed, s as u64)?;
            let x = complete(solve_spde(problem, &driver, config)?, "stochastic solve")?;
            let mut out = SampleResult {
                distances: Vec::new(),
                shifted: Vec::new(),
                interpolation: Vec::new(),
            };
            for &n in &setup.levels {
                let interp = AdaptedInterpolation::new(&driver, n)?;
                let s_n = complete(
                    solve_controlled(problem, &interp, config)?,
                    "controlled solve",
                )?;
                out.distances.push(distance(criticality, &s_n, &x)?);
                out.interpolation
                    .push(interpolation_gap(&g, &driver, &interp)?);
                if let (Some(h), Some(reference)) = (control, &reference) {
                    let path =
                        IncrementPath::combine(&[(1.0, &interp), (-1.0, &driver), (1.0, h)])?;
                    let shifted = complete(
                        solve_spde(problem, &path, config)?,
                        "shifted stochastic solve",
                    )?;
                    out.shifted
                        .push(distance(criticality, &shifted, reference)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let per_level = |pick: &dyn Fn(&SampleResult) -> &Vec<f64>| -> Vec<Vec<f64>> {
        (0..setup.levels.len())
            .map(|l| results.iter().map(|r| pick(r)[l]).collect())
            .collect()
    };
    let stats = |table: &[Vec<f64>]| -> Vec<LevelStat> {
        setup
            .levels
            .iter()
            .zip(table)
            .map(|(&n, v)| LevelStat::from_samples(n, v))
            .collect()
    };
    let distances = per_level(&|r| &r.distances);
    let interpolation = stats(&per_level(&|r| &r.interpolation));
    let (shifted_distances, shifted_stats) = if control.is_some() {
        let table = per_level(&|r| &r.shifted);
        let st = stats(&table);
        (Some(table), Some(st))
    } else {
        (None, None)
    };
    Ok(SupportReport {
        levels: setup.levels.clone(),
        norm: match criticality {
            Criticality::Mass => "S0".into(),
            Criticality::Energy => "S1".into(),
        },
        distance_stats: stats(&distances),
        distances,
        shifted_distances,
        shifted_stats,
        interpolation,
        samples: setup.samples,
    })
}

/// Per level, the Monte Carlo mean of `sup_t |∫ g dβ^n - ∫ g dβ|^2` for one channel with
/// integrand samples `g` on the driver mesh.
pub fn interpolation_convergence(g: &[f64], setup: &SupportSetup) -> Result<Vec<LevelStat>> {
    let mesh = setup.mesh()?;
    if g.len() != mesh.steps() + 1 {
        return Err(Error::MeshMismatch(format!(
            "integrand has {} samples for {} mesh steps",
            g.len(),
            mesh.steps()
        )));
    }
    setup.check_levels(&mesh)?;
    let g = vec![g.to_vec()];
    let rows = (0..setup.samples)
        .into_par_iter()
        .map(|s| -> Result<Vec<f64>> {
            let driver = sample_driver(mesh, 1, setup.seed, s as u64)?;
            setup
                .levels
                .iter()
                .map(|&n| interpolation_gap(&g, &driver, &AdaptedInterpolation::new(&driver, n)?))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(setup
        .levels
        .iter()
        .enumerate()
        .map(|(l, &n)| LevelStat::from_samples(n, &rows.iter().map(|r| r[l]).collect::<Vec<_>>()))
        .collect())
}
