use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentSpec, RunConfig};
use super::store::{csv_header, write_trajectory};
use super::{build, Check, CODE_VERSION};
use crate::dynamics::{solve_deterministic, solve_spde, Criticality, ProblemSpec, Trajectory};
use crate::error::{Error, Result};
use crate::experiments::{
    scattering_diagnostic, stability_sweep, strictly_decreasing, support_comparison, LevelStat,
    ScatteringReport, StabilityReport, SupportReport, SupportSetup,
};
use crate::noise::{sample_driver, BrownianDriver, NoiseModel, TimeMesh};
use crate::observables::{
    h1_norm, hamiltonian, ito_energy_residual, ito_mass_residual, mass, norm_profile,
    ItoResidualReport, NormProfile,
};
use crate::rescaling::forward_phase;

pub const RUN_FORMAT: &str = "snls-run/1";

/// Result of [`run`]: the checks, the files written and an abort reason if a solve failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOutcome {
    pub experiment: String,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    /// Set when a solve hit the blow-up or finiteness sentinel.
    pub aborted: Option<String>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.aborted.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.aborted.is_some() {
            super::exit::NUMERICAL
        } else if self.passed() {
            super::exit::PASS
        } else {
            super::exit::CHECK_FAILED
        }
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Collects file writes of one run; every write happens on the calling thread.
struct Sink<'a> {
    out: &'a Path,
    hash: String,
    seed: u64,
    artifacts: Vec<String>,
}

impl Sink<'_> {
    fn csv(&mut self, name: &str, header: &str, rows: &[Vec<String>]) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.out.join(name))?);
        csv_header(&mut w, &self.hash, self.seed)?;
        writeln!(w, "{header}")?;
        for r in rows {
            writeln!(w, "{}", r.join(","))?;
        }
        w.flush()?;
        self.artifacts.push(name.into());
        Ok(())
    }

    fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        fs::write(
            self.out.join(name),
            serde_json::to_string_pretty(value)? + "\n",
        )?;
        self.artifacts.push(name.into());
        Ok(())
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

/// Everything [`run`] needs besides the configuration.
struct Context<'a> {
    cfg: &'a RunConfig,
    problem: ProblemSpec<f64>,
    mesh: TimeMesh,
}

impl Context<'_> {
    fn noise(&self) -> Result<&NoiseModel<f64>> {
        self.problem
            .noise()
            .ok_or_else(|| Error::Config("this experiment needs a noise block".into()))
    }

    fn driver(&self, sample: usize) -> Result<Option<BrownianDriver>> {
        self.problem
            .noise()
            .map(|n| sample_driver(self.mesh, n.channels(), self.cfg.seed, sample as u64))
            .transpose()
    }

    /// True when every amplitude vanishes on the mesh.
    fn noise_is_silent(&self) -> bool {
        self.problem.noise().is_none_or(|n| {
            (0..n.channels()).all(|k| self.mesh.times().iter().all(|&t| n.g(k, t) == 0.0))
        })
    }
}

/// Runs the experiment `experiment` for `cfg` and writes its artifacts below `out`.
///
/// Artifacts other than `timing.json` are pure functions of the configuration.
pub fn run(cfg: &RunConfig, experiment: &ExperimentSpec, out: &Path) -> Result<RunOutcome> {
    let started = Instant::now();
    let problem = build::problem(cfg)?;
    let mesh = build::mesh(cfg)?;
    cfg.solver.solver_config().validate()?;
    fs::create_dir_all(out)?;
    let mut sink = Sink {
        out,
        hash: cfg.hash(),
        seed: cfg.seed,
        artifacts: Vec::new(),
    };
    let ctx = Context { cfg, problem, mesh };
    let (checks, summary, aborted) = if cfg.samples == 0 {
        (Vec::new(), Value::Null, None)
    } else {
        match experiment {
            ExperimentSpec::Simulate { persist } => simulate(&ctx, *persist, &mut sink)?,
            ExperimentSpec::Stability {
                epsilons,
                forcing,
                direction,
                slope_range,
            } => {
                let dir = build::field(cfg, direction, ctx.problem.grid())?;
                stability(&ctx, epsilons, *forcing, &dir, *slope_range, &mut sink)?
            }
            ExperimentSpec::Scatter {
                horizon,
                checkpoints,
            } => scatter(&ctx, *horizon, checkpoints, &mut sink)?,
            ExperimentSpec::Support { levels, control } => {
                let h = match control {
                    Some(c) => Some(build::control(cfg, c, ctx.mesh, ctx.noise()?.channels())?),
                    None => None,
                };
                support(&ctx, levels, h.as_ref(), &mut sink)?
            }
            ExperimentSpec::Norms => norms(&ctx, &mut sink)?,
        }
    };
    if cfg.samples > 0 {
        let report = json!({
            "provenance": { "code_version": CODE_VERSION, "config_hash": sink.hash, "seed": cfg.seed },
            "experiment": experiment.name(),
            "config": cfg,
            "checks": checks,
            "aborted": aborted,
            "summary": summary,
        });
        sink.json("report.json", &report)?;
    }
    let mut artifacts = sink.artifacts.clone();
    artifacts.sort();
    let manifest = json!({
        "format": RUN_FORMAT,
        "code_version": CODE_VERSION,
        "experiment": experiment.name(),
        "config_hash": sink.hash,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "config": cfg,
        "experiment_parameters": experiment,
        "artifacts": artifacts,
    });
    fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    fs::write(
        out.join("timing.json"),
        serde_json::to_string_pretty(&json!({ "wall_seconds": started.elapsed().as_secs_f64() }))?
            + "\n",
    )?;
    Ok(RunOutcome {
        experiment: experiment.name().into(),
        checks,
        artifacts,
        aborted,
    })
}

/// Below this the standard error is too noisy for a 3 SE test to mean anything.
const MARTINGALE_MIN_SAMPLES: usize = 30;

type Stage = (Vec<Check>, Value, Option<String>);

fn abort_reason(traj: &Trajectory<f64>, sample: usize) -> Option<String> {
    (!traj.is_complete()).then(|| format!("sample {sample}: {:?}", traj.status))
}

fn solve(ctx: &Context<'_>, driver: Option<&BrownianDriver>) -> Result<Trajectory<f64>> {
    let solver = ctx.cfg.solver.solver_config();
    match driver {
        Some(d) => solve_spde(&ctx.problem, d, &solver),
        None => solve_deterministic(&ctx.problem, &solver, ctx.cfg.solver.horizon),
    }
}

/// Trajectory, driver, mass residual and energy residual of a persisted sample.
type Persisted = (
    Trajectory<f64>,
    Option<BrownianDriver>,
    Option<ItoResidualReport>,
    Option<ItoResidualReport>,
);

struct SimSample {
    mass0: f64,
    mass_final: f64,
    drift: f64,
    residual_sup: Option<f64>,
    h_final: f64,
    h1_ratio: f64,
    abort: Option<String>,
    kept: Option<Persisted>,
}

fn simulate(ctx: &Context<'_>, persist: usize, sink: &mut Sink<'_>) -> Result<Stage> {
    let stride_one = ctx.cfg.solver.store_stride == 1;
    let energy = ctx.problem.criticality() == Criticality::Energy;
    let (lambda, alpha) = (ctx.problem.lambda(), ctx.problem.alpha());
    let samples: Vec<SimSample> = (0..ctx.cfg.samples)
        .into_par_iter()
        .map(|s| -> Result<SimSample> {
            let driver = ctx.driver(s)?;
            let traj = solve(ctx, driver.as_ref())?;
            let abort = abort_reason(&traj, s);
            let (residual, energy_residual) = match (&driver, ctx.problem.noise()) {
                (Some(d), Some(n)) if stride_one && abort.is_none() => {
                    let r = ito_mass_residual(&traj, n, d)?;
                    let e = if energy {
                        Some(ito_energy_residual(&traj, n, d, lambda, alpha)?)
                    } else {
                        None
                    };
                    (Some(r), e)
                }
                _ => (None, None),
            };
            let m0 = traj.mass[0];
            let drift = traj.mass.iter().fold(0.0f64, |w, m| w.max((m - m0).abs()))
                / m0.max(f64::MIN_POSITIVE);
            let h1_0 = h1_norm(ctx.problem.initial());
            let h1_max = traj
                .series
                .fields()
                .iter()
                .map(h1_norm)
                .fold(0.0f64, f64::max);
            Ok(SimSample {
                mass0: m0,
                mass_final: *traj.mass.last().expect("mass record"),
                drift,
                residual_sup: residual.as_ref().map(ItoResidualReport::sup),
                h_final: hamiltonian(traj.final_state(), lambda, alpha),
                h1_ratio: if h1_0 > 0.0 { h1_max / h1_0 } else { 0.0 },
                abort,
                kept: (s < persist).then_some((traj, driver, residual, energy_residual)),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<Vec<String>> = samples
        .iter()
        .enumerate()
        .map(|(s, r)| {
            vec![
                s.to_string(),
                num(r.mass0),
                num(r.mass_final),
                num(r.drift),
                opt_num(r.residual_sup),
                num(r.h_final),
            ]
        })
        .collect();
    sink.csv(
        "samples.csv",
        "sample,mass_initial,mass_final,max_rel_mass_drift,mass_residual_sup,hamiltonian_final",
        &rows,
    )?;
    for (s, r) in samples.iter().enumerate() {
        let Some((traj, driver, residual, energy_residual)) = &r.kept else {
            continue;
        };
        let name = format!("trajectories/sample_{s:06}");
        write_trajectory(
            &sink.out.join(&name),
            ctx.cfg,
            s as u64,
            traj,
            driver.as_ref(),
            residual.as_ref(),
        )?;
        sink.artifacts.push(name);
        if let Some(e) = energy_residual {
            let terms = e.terms.as_ref().expect("energy terms");
            let rows: Vec<Vec<String>> = e
                .times
                .iter()
                .zip(&e.residual)
                .zip(terms)
                .map(|((t, v), tm)| {
                    let mut row = vec![num(*t), num(*v)];
                    row.extend(tm.as_array().iter().map(|x| num(*x)));
                    row
                })
                .collect();
            sink.csv(
                &format!("energy_residual_{s:06}.csv"),
                "t,residual,term_1,term_2,term_3,term_4,term_5,term_6",
                &rows,
            )?;
        }
    }

    let aborted = samples.iter().find_map(|r| r.abort.clone());
    let mut checks = Vec::new();
    let conservative = ctx.problem.noise().is_none_or(|n| n.is_conservative());
    if conservative {
        let worst = samples.iter().map(|r| r.drift).fold(0.0, f64::max);
        checks.push(Check::at_most("mass_conservation", worst, 1e-8));
    } else if samples.len() >= MARTINGALE_MIN_SAMPLES {
        let m0 = samples[0].mass0;
        let finals: Vec<f64> = samples.iter().map(|r| r.mass_final).collect();
        let stat = LevelStat::from_samples(0, &finals);
        checks.push(Check::at_most(
            "martingale_mean_mass",
            (stat.mean - m0).abs(),
            3.0 * stat.se,
        ));
    }
    if lambda < 0.0 {
        let worst = samples
            .iter()
            .map(|r| r.h_final)
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::at_least("hamiltonian_nonnegative", worst, 0.0));
    }
    let summary = json!({
        "samples": samples.len(),
        "max_rel_mass_drift": samples.iter().map(|r| r.drift).fold(0.0, f64::max),
        "max_h1_ratio": samples.iter().map(|r| r.h1_ratio).fold(0.0, f64::max),
        "mean_final_mass": samples.iter().map(|r| r.mass_final).sum::<f64>() / samples.len() as f64,
    });
    Ok((checks, summary, aborted))
}

fn stability(
    ctx: &Context<'_>,
    epsilons: &[f64],
    forcing: crate::experiments::ForcingKind,
    direction: &crate::spectral::ComplexField<f64>,
    range: [f64; 2],
    sink: &mut Sink<'_>,
) -> Result<Stage> {
    let noise = ctx.noise()?;
    let solver = ctx.cfg.solver.solver_config();
    let reports: Vec<StabilityReport> = (0..ctx.cfg.samples)
        .into_par_iter()
        .map(|s| {
            let driver = sample_driver(ctx.mesh, noise.channels(), ctx.cfg.seed, s as u64)?;
            let phase = forward_phase(noise, &driver, 0)?;
            stability_sweep(&ctx.problem, &phase, &solver, epsilons, forcing, direction)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (s, r) in reports.iter().enumerate() {
        for e in &r.entries {
            rows.push(vec![
                s.to_string(),
                num(e.epsilon),
                opt_num(e.deviation),
                e.flagged.to_string(),
            ]);
        }
    }
    sink.csv("stability.csv", "sample,epsilon,deviation,flagged", &rows)?;
    let mut checks = Vec::new();
    let zero_dev = reports
        .iter()
        .flat_map(|r| {
            r.entries
                .iter()
                .filter(|e| e.epsilon == 0.0)
                .filter_map(|e| e.deviation)
        })
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    if let Some(z) = zero_dev {
        checks.push(Check::at_most("zero_forcing_deviation", z, 1e-10));
    }
    for (s, r) in reports.iter().enumerate() {
        if let Some(slope) = r.slope {
            let name = format!("slope_sample_{s}");
            checks.push(Check {
                name,
                passed: slope >= range[0] && slope <= range[1],
                value: Some(slope),
                threshold: None,
            });
        }
    }
    Ok((checks, serde_json::to_value(&reports)?, None))
}

fn scatter(
    ctx: &Context<'_>,
    horizon: f64,
    checkpoints: &[f64],
    sink: &mut Sink<'_>,
) -> Result<Stage> {
    ctx.noise()?;
    let solver = ctx.cfg.solver.solver_config();
    let horizon = if horizon > 0.0 {
        horizon
    } else {
        ctx.cfg.solver.horizon
    };
    let checkpoints: Vec<f64> = if checkpoints.is_empty() {
        let steps = (horizon / solver.dt).round() as usize;
        (0..=4)
            .map(|i| (i * steps / 4) as f64 * solver.dt)
            .collect()
    } else {
        checkpoints.to_vec()
    };
    let reports: Vec<ScatteringReport> = (0..ctx.cfg.samples)
        .into_par_iter()
        .map(|s| {
            let driver = ctx.driver(s)?.expect("noise block checked");
            scattering_diagnostic(&ctx.problem, &driver, horizon, &checkpoints, &solver)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (s, r) in reports.iter().enumerate() {
        for (i, t) in r.checkpoints.iter().enumerate() {
            let prev = |table: &Vec<Vec<f64>>| if i == 0 { 0.0 } else { table[i - 1][i] };
            rows.push(vec![
                s.to_string(),
                num(*t),
                num(r.pullback_defect[i]),
                num(r.pullback_defect_initial[i]),
                num(prev(&r.free_gaps)),
                num(prev(&r.rescaled_gaps)),
            ]);
        }
    }
    sink.csv(
        "scatter.csv",
        "sample,t,pullback_defect,pullback_defect_initial,free_gap_prev,rescaled_gap_prev",
        &rows,
    )?;
    let aborted = reports
        .iter()
        .position(|r| !r.complete)
        .map(|s| format!("sample {s}: stochastic solve stopped early"));
    let mut checks = Vec::new();
    if !ctx.problem.nonlinear() {
        let worst = reports
            .iter()
            .flat_map(|r| r.pullback_defect.iter().copied())
            .fold(0.0, f64::max);
        checks.push(Check::at_most("pullback_defect", worst, 1e-3));
        if ctx.noise_is_silent() {
            let worst = reports
                .iter()
                .flat_map(|r| r.free_gaps.iter().flatten().copied())
                .fold(0.0, f64::max);
            checks.push(Check::at_most("free_pullback_constant", worst, 1e-10));
        }
    }
    Ok((checks, serde_json::to_value(&reports)?, aborted))
}

fn support(
    ctx: &Context<'_>,
    levels: &[u32],
    control: Option<&crate::noise::CameronMartinControl>,
    sink: &mut Sink<'_>,
) -> Result<Stage> {
    let setup = SupportSetup {
        horizon: ctx.cfg.solver.horizon,
        driver_dt: ctx.cfg.solver.dt,
        levels: levels.to_vec(),
        samples: ctx.cfg.samples,
        seed: ctx.cfg.seed,
    };
    let report: SupportReport = support_comparison(
        &ctx.problem,
        &ctx.cfg.solver.solver_config(),
        &setup,
        control,
    )?;
    let mut rows = Vec::new();
    for (l, &n) in report.levels.iter().enumerate() {
        for s in 0..report.samples {
            let shifted = report.shifted_distances.as_ref().map(|t| t[l][s]);
            rows.push(vec![
                n.to_string(),
                s.to_string(),
                num(report.distances[l][s]),
                opt_num(shifted),
            ]);
        }
    }
    sink.csv(
        "support.csv",
        "level,sample,distance,shifted_distance",
        &rows,
    )?;
    let rows: Vec<Vec<String>> = report
        .distance_stats
        .iter()
        .zip(&report.interpolation)
        .map(|(d, i)| {
            vec![
                d.level.to_string(),
                num(d.mean),
                num(d.se),
                num(i.mean),
                num(i.se),
            ]
        })
        .collect();
    sink.csv(
        "support_levels.csv",
        "level,distance_mean,distance_se,interpolation_mean,interpolation_se",
        &rows,
    )?;
    let mut checks = Vec::new();
    if ctx.noise_is_silent() {
        let worst = report
            .distances
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max);
        checks.push(Check::at_most("degenerate_distance", worst, 1e-12));
    } else if report.levels.len() >= 2 {
        checks.push(Check::boolean(
            "distance_decreasing",
            strictly_decreasing(&report.distance_stats, 0.0),
        ));
        checks.push(Check::boolean(
            "interpolation_decreasing",
            strictly_decreasing(&report.interpolation, 1.0),
        ));
    }
    Ok((checks, serde_json::to_value(&report)?, None))
}

fn norm_rows(s: usize, p: &NormProfile) -> Vec<Vec<String>> {
    let mut named: Vec<(String, f64)> = vec![("V".into(), p.v)];
    if let Some(w) = p.w {
        named.push(("W".into(), w));
    }
    if let Some(w) = p.ww {
        named.push(("W1".into(), w));
    }
    for (q, r, v) in &p.s0_pairs {
        named.push((format!("S0({q};{r})"), *v));
    }
    named.push(("S0".into(), p.s0));
    named.push(("local_smoothing_1/2".into(), p.local_half));
    named.push(("local_smoothing_3/2".into(), p.local_three_halves));
    if let Some([x0, xx, yy]) = p.exotic {
        named.extend([("X0".into(), x0), ("XX".into(), xx), ("YY".into(), yy)]);
    }
    named
        .into_iter()
        .map(|(n, v)| vec![s.to_string(), n, num(v)])
        .collect()
}

fn norms(ctx: &Context<'_>, sink: &mut Sink<'_>) -> Result<Stage> {
    let profiles: Vec<(NormProfile, Option<String>, f64)> = (0..ctx.cfg.samples)
        .into_par_iter()
        .map(|s| {
            let driver = ctx.driver(s)?;
            let traj = solve(ctx, driver.as_ref())?;
            Ok((
                norm_profile(&traj)?,
                abort_reason(&traj, s),
                mass(traj.final_state()),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = profiles
        .iter()
        .enumerate()
        .flat_map(|(s, (p, _, _))| norm_rows(s, p))
        .collect();
    sink.csv("norms.csv", "sample,norm,value", &rows)?;
    let aborted = profiles.iter().find_map(|p| p.1.clone());
    let summary: Vec<&NormProfile> = profiles.iter().map(|p| &p.0).collect();
    Ok((Vec::new(), serde_json::to_value(summary)?, aborted))
}
