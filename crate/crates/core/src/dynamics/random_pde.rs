use num_complex::Complex;

use super::problem::{ProblemSpec, Scheme, SolverConfig};
use super::stepper::Stepper;
use super::trajectory::{Equation, Recorder, Trajectory};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rescaling::PhasePath;
use crate::spectral::ComplexField;

/// Largest `|b|_∞ dt / h` accepted by the transformed-equation solver.
pub const TRANSPORT_CFL_LIMIT: f64 = 0.5;

fn check_mesh<R: Real>(phase: &PhasePath<'_, R>, config: &SolverConfig) -> Result<()> {
    let dt = phase.mesh().dt();
    if (dt - config.dt).abs() > 1e-12 * dt {
        return Err(Error::MeshMismatch(format!(
            "solver dt {} differs from the phase step {dt}",
            config.dt
        )));
    }
    Ok(())
}

fn cfl_guard<R: Real>(phase: &PhasePath<'_, R>, dt: f64) -> Result<()> {
    let h = phase.model().grid().spacing().as_f64();
    for j in 0..phase.len() {
        let grads = phase.gradient(j);
        let n = grads[0].values().len();
        let b = (0..n)
            .map(|i| {
                2.0 * grads
                    .iter()
                    .map(|g| g.values()[i].norm_sqr().as_f64())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        let ratio = b * dt / h;
        if ratio > TRANSPORT_CFL_LIMIT {
            return Err(Error::Config(format!(
                "transport coefficient too large at t = {}: |b|_inf dt / h = {ratio:.3} > {TRANSPORT_CFL_LIMIT}",
                phase.mesh().time(j)
            )));
        }
    }
    Ok(())
}

struct Frozen<R: Real> {
    b: Vec<Vec<Complex<R>>>,
    c: Vec<Complex<R>>,
    weight: Option<Vec<R>>,
}

fn frozen<R: Real>(phase: &PhasePath<'_, R>, j: usize, exponent: Option<R>) -> Frozen<R> {
    let lo = phase.lower_order(j);
    let weight = exponent.map(|e| {
        phase
            .field(j)
            .values()
            .iter()
            .map(|z| (e * z.re).exp())
            .collect()
    });
    Frozen {
        b: lo.b.into_iter().map(ComplexField::into_values).collect(),
        c: lo.c.into_values(),
        weight,
    }
}

/// Transformed equation `i v_t = (Δ + b·∇ + c) v + λ e^{(α-1) Re φ} F(v)` with `b`, `c`
/// built from `phase` and frozen at the left end of each step.
///
/// The initial datum of `problem` is taken as `v` at the first phase time.
pub fn solve_random_pde<R: Real>(
    problem: &ProblemSpec<R>,
    phase: &PhasePath<'_, R>,
    config: &SolverConfig,
) -> Result<Trajectory<R>> {
    transformed(problem, phase, config, None)
}

/// [`solve_random_pde`] with a time-independent error term `e` on the right side:
/// `i v_t = (Δ + b·∇ + c) v + λ e^{(α-1) Re φ} F(v) + e`.
pub fn solve_random_pde_forced<R: Real>(
    problem: &ProblemSpec<R>,
    phase: &PhasePath<'_, R>,
    config: &SolverConfig,
    error_term: &ComplexField<R>,
) -> Result<Trajectory<R>> {
    problem
        .grid()
        .ensure_same(error_term.grid(), "error term")?;
    transformed(problem, phase, config, Some(error_term))
}

/// `v -= i dt e`
fn force<R: Real>(v: &mut [Complex<R>], dt: R, e: Option<&ComplexField<R>>) {
    if let Some(e) = e {
        for (z, f) in v.iter_mut().zip(e.values()) {
            *z = *z - Complex::new(R::zero(), dt) * f;
        }
    }
}

fn transformed<R: Real>(
    problem: &ProblemSpec<R>,
    phase: &PhasePath<'_, R>,
    config: &SolverConfig,
    error_term: Option<&ComplexField<R>>,
) -> Result<Trajectory<R>> {
    config.validate()?;
    check_mesh(phase, config)?;
    problem
        .grid()
        .ensure_same(phase.model().grid(), "transformed equation")?;
    cfl_guard(phase, config.dt)?;
    let mesh = *phase.mesh();
    let alpha = R::lit(problem.alpha());
    let lambda = R::lit(problem.lambda());
    let dt = R::lit(mesh.dt());
    let half = dt / R::lit(2.0);
    let exponent = problem.nonlinear().then(|| alpha - R::one());
    let mut stepper = Stepper::new(problem.grid(), config.dealias_for(problem.alpha()));
    let mut recorder = Recorder::new(problem.initial(), mesh.t0(), config)?;
    let mut state = problem.initial().values().to_vec();
    let mut previous = state.clone();
    for j in 0..mesh.steps() {
        previous.copy_from_slice(&state);
        let fz = frozen(phase, j, exponent);
        let b: Vec<&[Complex<R>]> = fz.b.iter().map(Vec::as_slice).collect();
        match config.scheme {
            Scheme::Lie => {
                if problem.nonlinear() {
                    stepper.nonlinear(&mut state, dt, lambda, alpha, fz.weight.as_deref());
                }
                force(&mut state, dt, error_term);
                stepper.linear_perturbed(&mut state, dt, &b, &fz.c);
            }
            Scheme::Strang => {
                stepper.linear_perturbed(&mut state, half, &b, &fz.c);
                if problem.nonlinear() {
                    stepper.nonlinear(&mut state, dt, lambda, alpha, fz.weight.as_deref());
                }
                force(&mut state, dt, error_term);
                stepper.linear_perturbed(&mut state, half, &b, &fz.c);
            }
        }
        if !recorder.record(j + 1, &state, &previous, j + 1 == mesh.steps())? {
            break;
        }
    }
    let info = problem.info();
    Ok(recorder.finish(Equation::RandomPde, info, config.clone(), None))
}

/// Applies the homogeneous evolution operator of the transformed equation from mesh
/// index `index` back to the start of `phase`, i.e. `U(t_0, t_index) state`.
///
/// Each backward step freezes the coefficients where the forward solver does (the earlier
/// endpoint), so this inverts [`solve_random_pde`] with `F ≡ 0` up to the RK4 error.
pub fn pullback_homogeneous<R: Real>(
    phase: &PhasePath<'_, R>,
    state: &ComplexField<R>,
    index: usize,
) -> Result<ComplexField<R>> {
    if index > phase.mesh().steps() {
        return Err(Error::Domain(format!(
            "index {index} beyond the phase mesh"
        )));
    }
    phase.model().grid().ensure_same(state.grid(), "pullback")?;
    cfl_guard(phase, phase.mesh().dt())?;
    let dt = -R::lit(phase.mesh().dt());
    let mut stepper = Stepper::new(state.grid(), false);
    let mut v = state.values().to_vec();
    for i in (0..index).rev() {
        let fz = frozen(phase, i, None);
        let b: Vec<&[Complex<R>]> = fz.b.iter().map(Vec::as_slice).collect();
        stepper.linear_perturbed(&mut v, dt, &b, &fz.c);
    }
    ComplexField::from_values(*state.grid(), v)
}
