use serde::{Deserialize, Serialize};

use crate::dynamics::{pullback_homogeneous, solve_spde, Criticality, ProblemSpec, SolverConfig};
use crate::error::{Error, Result};
use crate::noise::{integer_ratio, BrownianDriver, DrivingPath};
use crate::observables::{kinetic, mass};
use crate::rescaling::{gauge, scattering_phase};
use crate::spectral::{free_evolve, ComplexField, Sign};

/// Pullbacks of the scattering gauge `z*(t) = e^{-φ*(t)} X(t)` at checkpoint times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub checkpoints: Vec<f64>,
    /// `e^{itΔ} z*(t)` per checkpoint.
    #[serde(skip)]
    pub free_pullback: Vec<ComplexField<f64>>,
    /// `U*(0,t) z*(t)` per checkpoint.
    #[serde(skip)]
    pub rescaled_pullback: Vec<ComplexField<f64>>,
    /// Pairwise `L^2` gaps, `[i][j]` between checkpoints `i` and `j`.
    pub free_gaps: Vec<Vec<f64>>,
    pub rescaled_gaps: Vec<Vec<f64>>,
    /// Pairwise `H^1` gaps (energy-critical runs only).
    pub free_gaps_h1: Option<Vec<Vec<f64>>>,
    pub rescaled_gaps_h1: Option<Vec<Vec<f64>>>,
    /// `|U*(0,t) z*(t) - z*(0)|_2 / |z*(0)|_2` per checkpoint.
    pub pullback_defect: Vec<f64>,
    /// The same against the initial datum `X_0` itself.
    pub pullback_defect_initial: Vec<f64>,
    /// Whether the stochastic solve reached the horizon.
    pub complete: bool,
}

impl ScatteringReport {
    /// Gap between consecutive checkpoints `i` and `i + 1` of a pairwise table.
    pub fn window_gaps(table: &[Vec<f64>]) -> Vec<f64> {
        (1..table.len()).map(|i| table[i - 1][i]).collect()
    }
}

fn l2(f: &ComplexField<f64>) -> f64 {
    mass(f).sqrt()
}

fn h1_gap(a: &ComplexField<f64>, b: &ComplexField<f64>) -> Result<f64> {
    let d = a.sub(b)?;
    Ok((mass(&d) + kinetic(&d)).sqrt())
}

fn pairwise(
    fields: &[ComplexField<f64>],
    gap: impl Fn(&ComplexField<f64>, &ComplexField<f64>) -> Result<f64>,
) -> Result<Vec<Vec<f64>>> {
    let n = fields.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let g = gap(&fields[i], &fields[j])?;
            out[i][j] = g;
            out[j][i] = g;
        }
    }
    Ok(out)
}

/// Runs the stochastic equation up to `horizon` and pulls the scattering gauge back to time 0
/// with the free flow and with the homogeneous transformed flow.
///
/// The driver is summed up to `config.dt`; every checkpoint must be a solver mesh time.
pub fn scattering_diagnostic(
    problem: &ProblemSpec<f64>,
    driver: &BrownianDriver,
    horizon: f64,
    checkpoints: &[f64],
    config: &SolverConfig,
) -> Result<ScatteringReport> {
    let noise = problem
        .noise()
        .ok_or_else(|| Error::Config("the scattering diagnostic needs a noise model".into()))?;
    let factor = if (config.dt - driver.mesh().dt()).abs() <= 1e-12 * config.dt {
        1
    } else {
        integer_ratio(config.dt, driver.mesh().dt()).ok_or_else(|| {
            Error::MeshMismatch("solver dt must be a multiple of the driver step".into())
        })?
    };
    let path = driver.coarsen(factor)?;
    let phase = scattering_phase(noise, &path, horizon)?;
    let mesh = *phase.mesh();
    let indices = checkpoints
        .iter()
        .map(|&t| {
            if (t - mesh.t0()).abs() <= 1e-12 {
                return Ok(0);
            }
            integer_ratio(t - mesh.t0(), mesh.dt())
                .filter(|i| *i <= mesh.steps())
                .ok_or_else(|| {
                    Error::Domain(format!(
                        "checkpoint {t} is not a solver mesh time before the horizon"
                    ))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let config = SolverConfig {
        store_stride: 1,
        ..config.clone()
    };
    let x = solve_spde(problem, &path, &config)?;
    let complete = x.is_complete();
    let stored = x.series.len();
    let z0 = gauge(problem.initial(), &phase.field(0), -1)?;
    let (scale0, scale_x0) = (l2(&z0), l2(problem.initial()));
    let mut times = Vec::new();
    let mut free = Vec::new();
    let mut rescaled = Vec::new();
    let mut defect = Vec::new();
    let mut defect_initial = Vec::new();
    for (&t, &i) in checkpoints.iter().zip(&indices) {
        if i >= stored {
            break;
        }
        let z = gauge(&x.series.fields()[i], &phase.field(i), -1)?;
        free.push(free_evolve(&z, t - mesh.t0(), Sign::Minus));
        let back = pullback_homogeneous(&phase, &z, i)?;
        defect.push(l2(&back.sub(&z0)?) / scale0);
        defect_initial.push(l2(&back.sub(problem.initial())?) / scale_x0);
        rescaled.push(back);
        times.push(t);
    }
    let l2_gap = |a: &ComplexField<f64>, b: &ComplexField<f64>| Ok(l2(&a.sub(b)?));
    let energy = problem.criticality() == Criticality::Energy;
    Ok(ScatteringReport {
        checkpoints: times,
        free_gaps: pairwise(&free, l2_gap)?,
        rescaled_gaps: pairwise(&rescaled, l2_gap)?,
        free_gaps_h1: if energy {
            Some(pairwise(&free, h1_gap)?)
        } else {
            None
        },
        rescaled_gaps_h1: if energy {
            Some(pairwise(&rescaled, h1_gap)?)
        } else {
            None
        },
        free_pullback: free,
        rescaled_pullback: rescaled,
        pullback_defect: defect,
        pullback_defect_initial: defect_initial,
        complete,
    })
}
