//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line; the test fails if any does.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use snls::cli_io::{parse_config, run, ExperimentSpec};
use snls::dynamics::{
    fitted_order, rescaling_equivalence, solve_spde, Criticality, ProblemSpec, Scheme, SolverConfig,
};
use snls::experiments::{
    interpolation_convergence, scattering_diagnostic, stability_sweep, strictly_decreasing,
    support_comparison, ForcingKind, LevelStat, SupportSetup,
};
use snls::noise::{
    make_bump_profile, sample_driver, NoiseChannel, NoiseModel, TimeAmplitude, TimeMesh,
};
use snls::observables::{ito_energy_residual, ito_mass_residual, mass};
use snls::rescaling::forward_phase;
use snls::spectral::norms::ww_norm;
use snls::spectral::{mixed_spacetime_norm, ComplexField, TorusGrid};

mod common;

use common::{
    energy_critical_holder_ratio, gradient_holder_ratio, mass_critical_holder_ratio, SmoothSeries,
};

type C = Complex<f64>;

const SUITE_SEED: u64 = 1729;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn line_grid(points: usize) -> TorusGrid<f64> {
    TorusGrid::new(1, points, 32.0).unwrap()
}

fn gaussian(grid: TorusGrid<f64>, amp: f64) -> ComplexField<f64> {
    ComplexField::from_fn(grid, |x| {
        C::new(
            amp * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(),
            0.0,
        )
    })
}

fn bump_noise(
    grid: &TorusGrid<f64>,
    amp: C,
    conservative: bool,
    amplitude: TimeAmplitude,
) -> NoiseModel<f64> {
    let center = vec![if grid.dim() == 1 { -1.0 } else { 0.0 }; grid.dim()];
    NoiseModel::new(vec![NoiseChannel {
        profile: make_bump_profile(grid, &center, 5.0, amp, conservative).unwrap(),
        amplitude,
    }])
    .unwrap()
}

fn constant(v: f64) -> TimeAmplitude {
    TimeAmplitude::Constant { value: v }
}

fn mass_problem(grid: TorusGrid<f64>, noise: NoiseModel<f64>) -> ProblemSpec<f64> {
    ProblemSpec::new(Criticality::Mass, -1.0, gaussian(grid, 1.0), Some(noise)).unwrap()
}

fn conservative_mass() -> Verdict {
    let g = line_grid(128);
    let p = mass_problem(g, bump_noise(&g, C::new(0.0, 0.5), true, constant(1.0)));
    let started = Instant::now();
    let driver = sample_driver(TimeMesh::covering(1.0, 1e-3).unwrap(), 1, SUITE_SEED, 0).unwrap();
    let traj = solve_spde(&p, &driver, &SolverConfig::new(1e-3)).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let m0 = traj.mass[0];
    let drift = traj
        .mass
        .iter()
        .map(|m| (m - m0).abs() / m0)
        .fold(0.0, f64::max);
    verdict(
        drift <= 1e-8 && secs <= 10.0,
        format!("sup relative mass drift {drift:.3e} (<= 1e-8), {secs:.2} s (<= 10 s)"),
    )
}

fn martingale_mass() -> Verdict {
    let g = line_grid(128);
    let p = mass_problem(g, bump_noise(&g, C::new(0.3, 0.5), false, constant(1.0)));
    let mesh = TimeMesh::covering(1.0, 1e-3).unwrap();
    let started = Instant::now();
    let finals: Vec<f64> = (0..500u64)
        .into_par_iter()
        .map(|s| {
            let driver = sample_driver(mesh, 1, SUITE_SEED, s).unwrap();
            *solve_spde(&p, &driver, &SolverConfig::new(1e-3))
                .unwrap()
                .mass
                .last()
                .unwrap()
        })
        .collect();
    let stat = LevelStat::from_samples(0, &finals);
    let m0 = mass(p.initial());
    let gap = (stat.mean - m0).abs();
    verdict(
        gap <= 3.0 * stat.se,
        format!(
            "|mean mass(T) - m0| = {gap:.3e}, 3 SE = {:.3e}, {:.1} s",
            3.0 * stat.se,
            started.elapsed().as_secs_f64()
        ),
    )
}

/// Residual studies run without the dealias projection, which is not part of the equation.
fn residual_config(dt: f64) -> SolverConfig {
    SolverConfig::new(dt)
        .with_scheme(Scheme::Lie)
        .with_dealias(false)
}

const RESIDUAL_FACTORS: [usize; 3] = [4, 2, 1];

fn ito_mass() -> Verdict {
    let g = line_grid(128);
    let noise = bump_noise(&g, C::new(0.3, 0.5), false, constant(1.0));
    let p = mass_problem(g, noise.clone());
    let mesh = TimeMesh::covering(1.0, 1e-3).unwrap();
    let samples = 2000u64;
    let sups: Vec<[f64; 3]> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let driver = sample_driver(mesh, 1, SUITE_SEED, s).unwrap();
            RESIDUAL_FACTORS.map(|f| {
                let traj = solve_spde(&p, &driver, &residual_config(1e-3 * f as f64)).unwrap();
                ito_mass_residual(&traj, &noise, &driver).unwrap().sup()
            })
        })
        .collect();
    let points: Vec<(f64, f64)> = (0..3)
        .map(|l| {
            (
                1e-3 * RESIDUAL_FACTORS[l] as f64,
                sups.iter().map(|s| s[l]).sum::<f64>() / samples as f64,
            )
        })
        .collect();
    let order = fitted_order(&points);

    let cons_noise = bump_noise(&g, C::new(0.0, 0.5), true, constant(1.0));
    let cons = mass_problem(g, cons_noise.clone());
    let driver = sample_driver(mesh, 1, SUITE_SEED, 0).unwrap();
    let cons_sup = RESIDUAL_FACTORS
        .map(|f| {
            let traj = solve_spde(&cons, &driver, &SolverConfig::new(1e-3 * f as f64)).unwrap();
            ito_mass_residual(&traj, &cons_noise, &driver)
                .unwrap()
                .sup()
        })
        .into_iter()
        .fold(0.0, f64::max);
    verdict(
        order >= 0.5 && cons_sup <= 1e-8,
        format!(
            "fitted order of E sup|R| {order:.3} (>= 0.5; {samples} paths, means {:?}), conservative sup|R| {cons_sup:.3e} (<= 1e-8)",
            points.iter().map(|p| format!("{:.4e}", p.1)).collect::<Vec<_>>()
        ),
    )
}

fn ito_energy() -> Verdict {
    let g = TorusGrid::<f64>::new(3, 32, 16.0).unwrap();
    let problem = |noise: &NoiseModel<f64>| {
        ProblemSpec::new(
            Criticality::Energy,
            -1.0,
            gaussian(g, 0.5),
            Some(noise.clone()),
        )
        .unwrap()
    };
    let noise = bump_noise(&g, C::new(0.3, 0.5), false, constant(1.0));
    let p = problem(&noise);
    let mesh = TimeMesh::covering(0.1, 1e-3).unwrap();
    let samples = 48u64;
    let sups: Vec<[f64; 3]> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let driver = sample_driver(mesh, 1, SUITE_SEED, s).unwrap();
            RESIDUAL_FACTORS.map(|f| {
                let traj = solve_spde(&p, &driver, &residual_config(1e-3 * f as f64)).unwrap();
                ito_energy_residual(&traj, &noise, &driver, -1.0, p.alpha())
                    .unwrap()
                    .sup()
            })
        })
        .collect();
    let rms: Vec<f64> = (0..3)
        .map(|l| (sups.iter().map(|s| s[l] * s[l]).sum::<f64>() / samples as f64).sqrt())
        .collect();
    let decreasing = rms.windows(2).all(|w| w[1] < w[0]);

    let cons_noise = bump_noise(&g, C::new(0.0, 0.5), true, constant(1.0));
    let cons = problem(&cons_noise);
    let driver = sample_driver(mesh, 1, SUITE_SEED, 0).unwrap();
    let traj = solve_spde(&cons, &driver, &residual_config(1e-3)).unwrap();
    let report = ito_energy_residual(&traj, &cons_noise, &driver, -1.0, cons.alpha()).unwrap();
    let exact_zero = report
        .terms
        .unwrap()
        .iter()
        .all(|t| t.potential_correction == 0.0 && t.potential_martingale == 0.0);
    verdict(
        decreasing && exact_zero,
        format!("RMS sup|R| over dt 4e-3/2e-3/1e-3: {:?} ({samples} paths), conservative Re G terms exactly 0: {exact_zero}", rms.iter().map(|r| format!("{r:.4e}")).collect::<Vec<_>>()),
    )
}

fn equivalence() -> Verdict {
    let g = line_grid(256);
    let p = mass_problem(g, bump_noise(&g, C::new(0.25, 0.5), false, constant(1.0)));
    let driver = sample_driver(TimeMesh::covering(1.0, 2.5e-4).unwrap(), 1, SUITE_SEED, 0).unwrap();
    let r = rescaling_equivalence(&p, &driver, 0, &SolverConfig::new(1e-3), 3).unwrap();
    let ratios: Vec<f64> = r.levels.windows(2).map(|w| w[0].1 / w[1].1).collect();
    let (dt_final, dev_final) = *r.levels.last().unwrap();
    verdict(
        ratios.iter().all(|&q| q >= 1.8) && dev_final <= 1e-4 && (dt_final - 2.5e-4).abs() < 1e-15,
        format!("deviation ratios {ratios:.3?} (>= 1.8), deviation {dev_final:.3e} at dt {dt_final:e} (<= 1e-4)"),
    )
}

fn stability() -> Verdict {
    let g = line_grid(128);
    let noise = bump_noise(&g, C::new(0.3, 0.5), false, constant(1.0));
    let p = mass_problem(g, noise.clone());
    let driver = sample_driver(TimeMesh::covering(0.5, 1e-3).unwrap(), 1, SUITE_SEED, 0).unwrap();
    let phase = forward_phase(&noise, &driver, 0).unwrap();
    let direction = ComplexField::from_fn(g, |x| C::new((-(x[0] - 2.0).powi(2) / 2.0).exp(), 0.0));
    let r = stability_sweep(
        &p,
        &phase,
        &SolverConfig::new(1e-3),
        &[1e-4, 1e-3, 1e-2],
        ForcingKind::InitialDatum,
        &direction,
    )
    .unwrap();
    let slope = r.slope.unwrap_or(f64::NAN);
    verdict(
        (0.9..=1.1).contains(&slope),
        format!("log-log slope {slope:.4} (in [0.9, 1.1])"),
    )
}

fn interpolation_trend() -> Verdict {
    let setup = SupportSetup {
        horizon: 1.0,
        driver_dt: 1.0 / 1024.0,
        levels: (2..=7).collect(),
        samples: 400,
        seed: SUITE_SEED,
    };
    let g: Vec<f64> = (0..=1024)
        .map(|j| (3.0 * j as f64 / 1024.0).cos())
        .collect();
    let stats = interpolation_convergence(&g, &setup).unwrap();
    verdict(
        strictly_decreasing(&stats, 1.0),
        format!(
            "E sup gap over n = 2..7: {:?} (each step > 1 SE)",
            stats
                .iter()
                .map(|s| format!("{:.3e}±{:.1e}", s.mean, s.se))
                .collect::<Vec<_>>()
        ),
    )
}

fn support_trend() -> Verdict {
    let g = line_grid(128);
    let setup = SupportSetup {
        horizon: 0.5,
        driver_dt: 1.0 / 1024.0,
        levels: vec![3, 4, 5, 6],
        samples: 100,
        seed: SUITE_SEED,
    };
    let cfg = SolverConfig::new(setup.driver_dt);
    let noisy = mass_problem(g, bump_noise(&g, C::new(0.3, 0.5), false, constant(1.0)));
    let r = support_comparison(&noisy, &cfg, &setup, None).unwrap();
    let decreasing = strictly_decreasing(&r.distance_stats, 0.0);
    let silent = mass_problem(g, bump_noise(&g, C::new(0.3, 0.5), false, constant(0.0)));
    let quiet = SupportSetup {
        samples: 4,
        ..setup.clone()
    };
    let worst = support_comparison(&silent, &cfg, &quiet, None)
        .unwrap()
        .distances
        .iter()
        .flatten()
        .fold(0.0f64, |m, &d| m.max(d));
    verdict(
        decreasing && worst <= 1e-12,
        format!(
            "mean distance over n = 3..6: {:?}, g = 0 distance {worst:.1e} (<= 1e-12)",
            r.distance_stats
                .iter()
                .map(|s| format!("{:.3e}", s.mean))
                .collect::<Vec<_>>()
        ),
    )
}

fn evolution_operator() -> Verdict {
    let g = line_grid(256);
    let pulse = TimeAmplitude::SmoothPulse {
        amplitude: 1.0,
        start: 0.0,
        end: 1.0,
    };
    let linear = |amplitude: TimeAmplitude| {
        ProblemSpec::new(
            Criticality::Mass,
            -1.0,
            gaussian(g, 1.0),
            Some(bump_noise(&g, C::new(0.25, 0.5), false, amplitude)),
        )
        .unwrap()
        .with_nonlinearity(false)
    };
    let fine = sample_driver(TimeMesh::covering(1.0, 5e-4).unwrap(), 1, SUITE_SEED, 0).unwrap();
    let checkpoints: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    let p = linear(pulse);
    let defect = |factor: usize| {
        let driver = fine.coarsen(factor).unwrap();
        let r = scattering_diagnostic(
            &p,
            &driver,
            1.0,
            &checkpoints,
            &SolverConfig::new(5e-4 * factor as f64),
        )
        .unwrap();
        r.pullback_defect.iter().fold(0.0f64, |m, &v| m.max(v))
    };
    let (coarse, finer) = (defect(2), defect(1));
    let silent = scattering_diagnostic(
        &linear(constant(0.0)),
        &fine,
        1.0,
        &checkpoints,
        &SolverConfig::new(5e-4),
    )
    .unwrap();
    let free = silent
        .free_gaps
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v));
    verdict(
        coarse <= 1e-3 && finer < coarse && free <= 1e-10,
        format!("sup pullback defect {coarse:.3e} at dt 1e-3 (<= 1e-3), {finer:.3e} at dt 5e-4, free pullback spread {free:.1e} (<= 1e-10)"),
    )
}

fn norm_inequalities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let cases = 200;
    let tol = 1.0 + 1e-9;
    let mut violations = [0usize; 3];
    let mut worst = [0.0f64; 3];
    for i in 0..cases {
        let dim = 1 + i % 3;
        let n = [0, 32, 16, 8][dim];
        let u = SmoothSeries::random(dim, 6.0, &mut rng).sample(n, 1.0, 6);
        let v = SmoothSeries::random(dim, 6.0, &mut rng).sample(n, 1.0, 6);
        let r = mass_critical_holder_ratio(&u, &v);
        violations[0] += (r > tol) as usize;
        worst[0] = worst[0].max(r);
    }
    for _ in 0..cases {
        let u = SmoothSeries::random(3, 6.0, &mut rng).sample(8, 1.0, 6);
        let v = SmoothSeries::random(3, 6.0, &mut rng).sample(8, 1.0, 6);
        let w = SmoothSeries::random(3, 6.0, &mut rng).sample(8, 1.0, 6);
        let (a, b) = (
            energy_critical_holder_ratio(&u, &v),
            gradient_holder_ratio(&u, &v, &w),
        );
        violations[1] += (a > tol) as usize;
        violations[2] += (b > tol) as usize;
        worst[1] = worst[1].max(a);
        worst[2] = worst[2].max(b);
    }
    // the embedding constant is not known in closed form; it must settle under refinement
    let family: Vec<SmoothSeries> = (0..cases)
        .map(|_| SmoothSeries::random(3, 6.0, &mut rng))
        .collect();
    let embedding = |n: usize| {
        family
            .par_iter()
            .map(|u| {
                let s = u.sample(n, 0.5, 4);
                mixed_spacetime_norm(&s, 10.0, 10.0).unwrap() / ww_norm(&s).unwrap()
            })
            .reduce(|| 0.0, f64::max)
    };
    let (c16, c32) = (embedding(16), embedding(32));
    let stable = (c16 / c32 - 1.0).abs() <= 0.1;
    verdict(
        violations.iter().all(|&v| v == 0) && stable,
        format!(
            "violations {violations:?} of {cases} each (max ratios {worst:.6?}), embedding constant {c16:.4} vs {c32:.4} under refinement"
        ),
    )
}

fn suite_configs() -> Vec<(Value, ExperimentSpec)> {
    let problem = json!({"criticality": "mass", "lambda": -1, "dim": 1, "points": 128, "length": 32,
                         "initial": {"kind": "gaussian", "amplitude": 1, "width": 1}});
    let noise = |amplitude: Value| {
        json!({"channels": [{"profile": {"kind": "bump", "center": [-1], "radius": 5,
        "amplitude": [0.25, 0.5], "conservative": false}, "amplitude": amplitude}]})
    };
    let constant = json!({"kind": "constant", "value": 1});
    let pulse = json!({"kind": "smooth_pulse", "amplitude": 1, "start": 0, "end": 0.5});
    let cfg = |noise: Value, dt: f64, horizon: f64| {
        json!({"problem": problem, "solver": {"dt": dt, "horizon": horizon, "scheme": "strang"}, "noise": noise,
               "seed": SUITE_SEED, "samples": 3})
    };
    vec![
        (
            cfg(noise(constant.clone()), 1e-3, 0.2),
            ExperimentSpec::Simulate { persist: 2 },
        ),
        (
            cfg(noise(constant.clone()), 1e-3, 0.2),
            ExperimentSpec::default_for("stability").unwrap(),
        ),
        (
            cfg(noise(pulse), 1e-3, 1.0),
            ExperimentSpec::Scatter {
                horizon: 1.0,
                checkpoints: vec![0.0, 0.5, 1.0],
            },
        ),
        (
            cfg(noise(constant.clone()), 1.0 / 1024.0, 0.25),
            ExperimentSpec::Support {
                levels: vec![3, 4],
                control: None,
            },
        ),
        (cfg(noise(constant), 1e-3, 0.2), ExperimentSpec::Norms),
    ]
}

fn tree(dir: &Path, out: &mut BTreeMap<String, Vec<u8>>, root: &Path) {
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            tree(&p, out, root);
        } else if p.file_name().unwrap() != "timing.json" {
            out.insert(
                p.strip_prefix(root).unwrap().display().to_string(),
                fs::read(&p).unwrap(),
            );
        }
    }
}

fn replay() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let snapshot = |tag: &str| {
        let root = tmp.path().join(tag);
        for (v, exp) in suite_configs() {
            let cfg = parse_config(&v.to_string()).unwrap();
            run(&cfg, &exp, &root.join(exp.name())).unwrap();
        }
        let mut files = BTreeMap::new();
        tree(&root, &mut files, &root);
        files
    };
    let (a, b) = (snapshot("first"), snapshot("second"));
    let differing: Vec<&String> = a.keys().filter(|k| b.get(*k) != a.get(*k)).collect();
    let payload = a
        .keys()
        .filter(|k| k.ends_with(".csv") || k.ends_with(".json"))
        .count();
    verdict(
        a.len() == b.len() && differing.is_empty() && payload > 0,
        format!(
            "{} artifacts ({payload} CSV/JSON) compared, {} differ",
            a.len(),
            differing.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("conservative mass conservation", conservative_mass),
        ("martingale mean mass", martingale_mass),
        ("Ito mass residual order", ito_mass),
        ("Ito energy residual", ito_energy),
        ("rescaling equivalence", equivalence),
        ("stability slope", stability),
        ("interpolation trend", interpolation_trend),
        ("support distance trend", support_trend),
        ("evolution operator", evolution_operator),
        ("norm inequalities", norm_inequalities),
        ("deterministic replay", replay),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let v = check();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        // written past the test harness capture so every line shows in the log
        let _ = writeln!(
            std::io::stderr(),
            "[{tag}] {:>2} {name}: {} [{:.1} s]",
            i + 1,
            v.detail,
            started.elapsed().as_secs_f64()
        );
        if !v.passed {
            failed.push(format!("{} {name}", i + 1));
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
