use serde::{Deserialize, Serialize};

use crate::dynamics::{
    fitted_order, solve_random_pde, solve_random_pde_forced, Criticality, ProblemSpec,
    SolverConfig, Trajectory,
};
use crate::error::{Error, Result};
use crate::rescaling::PhasePath;
use crate::spectral::norms::{v_norm, ww_norm};
use crate::spectral::ComplexField;

/// Where the perturbation of size `ε` enters the transformed equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingKind {
    /// `ṽ(0) = v(0) + εψ`
    InitialDatum,
    /// Constant error term `e = εψ` on the right side.
    AdditiveError,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityEntry {
    pub epsilon: f64,
    /// `‖v - ṽ‖` in `V` (mass-critical) or `L^q W^{1,p}` (energy-critical); `None` when flagged.
    pub deviation: Option<f64>,
    /// Set when either solve hit the blow-up or finiteness sentinel.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub kind: ForcingKind,
    pub norm: String,
    pub entries: Vec<StabilityEntry>,
    /// Log-log slope over unflagged entries with `ε > 0` and a positive deviation.
    pub slope: Option<f64>,
    /// Largest `deviation / ε` over the same entries.
    pub constant: Option<f64>,
}

fn norm_name(c: Criticality) -> &'static str {
    match c {
        Criticality::Mass => "V",
        Criticality::Energy => "W1",
    }
}

fn perturbed_run(
    problem: &ProblemSpec<f64>,
    phase: &PhasePath<'_, f64>,
    config: &SolverConfig,
    epsilon: f64,
    kind: ForcingKind,
    direction: &ComplexField<f64>,
) -> Result<Trajectory<f64>> {
    let step = direction.scale(epsilon.into());
    match kind {
        ForcingKind::InitialDatum => {
            let shifted = problem
                .clone()
                .with_initial(problem.initial().add(&step)?)?;
            solve_random_pde(&shifted, phase, config)
        }
        ForcingKind::AdditiveError => solve_random_pde_forced(problem, phase, config, &step),
    }
}

fn deviation(problem: &ProblemSpec<f64>, a: &Trajectory<f64>, b: &Trajectory<f64>) -> Result<f64> {
    let diff = a.series.difference(&b.series)?;
    match problem.criticality() {
        Criticality::Mass => v_norm(&diff),
        Criticality::Energy => ww_norm(&diff),
    }
}

/// Solves the transformed equation with and without an `ε`-perturbation along the same
/// phase and returns the norm of the difference.
pub fn stability_probe(
    problem: &ProblemSpec<f64>,
    phase: &PhasePath<'_, f64>,
    config: &SolverConfig,
    epsilon: f64,
    kind: ForcingKind,
    direction: &ComplexField<f64>,
) -> Result<StabilityEntry> {
    let base = solve_random_pde(problem, phase, config)?;
    probe_against(problem, phase, config, &base, epsilon, kind, direction)
}

fn probe_against(
    problem: &ProblemSpec<f64>,
    phase: &PhasePath<'_, f64>,
    config: &SolverConfig,
    base: &Trajectory<f64>,
    epsilon: f64,
    kind: ForcingKind,
    direction: &ComplexField<f64>,
) -> Result<StabilityEntry> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::Config(format!(
            "forcing magnitude must be finite and nonnegative (got {epsilon})"
        )));
    }
    let other = perturbed_run(problem, phase, config, epsilon, kind, direction)?;
    if !base.is_complete() || !other.is_complete() {
        return Ok(StabilityEntry {
            epsilon,
            deviation: None,
            flagged: true,
        });
    }
    Ok(StabilityEntry {
        epsilon,
        deviation: Some(deviation(problem, base, &other)?),
        flagged: false,
    })
}

/// [`stability_probe`] over `epsilons` with one shared unperturbed solve.
pub fn stability_sweep(
    problem: &ProblemSpec<f64>,
    phase: &PhasePath<'_, f64>,
    config: &SolverConfig,
    epsilons: &[f64],
    kind: ForcingKind,
    direction: &ComplexField<f64>,
) -> Result<StabilityReport> {
    let base = solve_random_pde(problem, phase, config)?;
    let entries = epsilons
        .iter()
        .map(|&e| probe_against(problem, phase, config, &base, e, kind, direction))
        .collect::<Result<Vec<_>>>()?;
    let usable: Vec<(f64, f64)> = entries
        .iter()
        .filter(|e| !e.flagged && e.epsilon > 0.0)
        .filter_map(|e| e.deviation.filter(|d| *d > 0.0).map(|d| (e.epsilon, d)))
        .collect();
    let slope = (usable.len() >= 2).then(|| fitted_order(&usable));
    let constant = usable.iter().map(|(e, d)| d / e).reduce(f64::max);
    Ok(StabilityReport {
        kind,
        norm: norm_name(problem.criticality()).into(),
        entries,
        slope,
        constant,
    })
}
