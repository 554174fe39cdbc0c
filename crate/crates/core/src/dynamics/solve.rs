use num_complex::Complex;

use super::problem::{ProblemSpec, Scheme, SolverConfig};
use super::stepper::Stepper;
use super::trajectory::{Equation, Recorder, Trajectory};
use crate::error::{Error, Result};
use crate::noise::{integer_ratio, DrivingPath, IncrementPath, NoiseModel, TimeMesh};
use crate::real::Real;

/// Solver mesh for a path whose step divides `config.dt`.
pub(crate) fn solver_mesh(path_mesh: &TimeMesh, dt: f64) -> Result<(TimeMesh, usize)> {
    let factor = if (dt - path_mesh.dt()).abs() <= 1e-12 * dt {
        1
    } else {
        integer_ratio(dt, path_mesh.dt()).ok_or_else(|| {
            Error::MeshMismatch(format!(
                "solver dt {dt} is not a multiple of the path step {}",
                path_mesh.dt()
            ))
        })?
    };
    let mesh = path_mesh.coarsen(factor)?;
    Ok((mesh, factor))
}

pub(crate) fn coarse_increments<P: DrivingPath>(path: &P, step: usize, factor: usize) -> Vec<f64> {
    (0..path.channels())
        .map(|k| {
            (0..factor)
                .map(|i| path.increment(step * factor + i, k))
                .sum()
        })
        .collect()
}

/// Multiplies by `exp(phase increment)` unless all coordinates vanish.
fn noise_step<R: Real>(
    state: &mut [Complex<R>],
    noise: &NoiseModel<R>,
    coeffs: &[f64],
) -> Result<()> {
    if coeffs.iter().all(|c| *c == 0.0) {
        return Ok(());
    }
    let inc = noise.combine(coeffs);
    let max_re = inc
        .values()
        .iter()
        .fold(R::neg_infinity(), |m, z| m.max(z.re));
    if max_re > R::exp_ceiling() {
        return Err(Error::Overflow {
            max_re: max_re.as_f64(),
        });
    }
    for (z, p) in state.iter_mut().zip(inc.values()) {
        *z = *z * p.exp();
    }
    Ok(())
}

fn integrate<R: Real, P: DrivingPath>(
    equation: Equation,
    problem: &ProblemSpec<R>,
    path: Option<&P>,
    config: &SolverConfig,
    horizon: f64,
) -> Result<Trajectory<R>> {
    config.validate()?;
    let (mesh, factor) = match path {
        Some(p) => solver_mesh(p.mesh(), config.dt)?,
        None => (
            TimeMesh::covering(horizon, config.dt).map_err(|e| Error::Config(e.to_string()))?,
            1,
        ),
    };
    let noise = match (path, problem.noise()) {
        (None, _) => None,
        (Some(p), Some(n)) => {
            if p.channels() != n.channels() {
                return Err(Error::MeshMismatch(format!(
                    "path has {} channels, noise model {}",
                    p.channels(),
                    n.channels()
                )));
            }
            Some(n)
        }
        (Some(_), None) => return Err(Error::Config("a driven solve needs a noise model".into())),
    };
    let alpha = R::lit(problem.alpha());
    let lambda = R::lit(problem.lambda());
    let dt = R::lit(mesh.dt());
    let half = dt / R::lit(2.0);
    let mut stepper = Stepper::new(problem.grid(), config.dealias_for(problem.alpha()));
    let mut recorder = Recorder::new(problem.initial(), mesh.t0(), config)?;
    let mut state = problem.initial().values().to_vec();
    let mut previous = state.clone();
    for j in 0..mesh.steps() {
        previous.copy_from_slice(&state);
        let coeffs = match (path, noise) {
            (Some(p), Some(n)) => {
                Some(n.step_coefficients(mesh.time(j), mesh.dt(), &coarse_increments(p, j, factor)))
            }
            _ => None,
        };
        if config.scheme == Scheme::Strang {
            stepper.linear(&mut state, half);
        }
        if let (Some(c), Some(n)) = (&coeffs, noise) {
            noise_step(&mut state, n, c)?;
        }
        if problem.nonlinear() {
            stepper.nonlinear(&mut state, dt, lambda, alpha, None);
        }
        match config.scheme {
            Scheme::Lie => stepper.linear(&mut state, dt),
            Scheme::Strang => stepper.linear(&mut state, half),
        }
        if !recorder.record(j + 1, &state, &previous, j + 1 == mesh.steps())? {
            break;
        }
    }
    let fingerprint = path.and_then(|p| p.fingerprint());
    Ok(recorder.finish(equation, problem.info(), config.clone(), fingerprint))
}

/// Itô SPDE driven by `driver` over its whole mesh.
pub fn solve_spde<R: Real, P: DrivingPath>(
    problem: &ProblemSpec<R>,
    driver: &P,
    config: &SolverConfig,
) -> Result<Trajectory<R>> {
    if problem.noise().is_none() {
        return Err(Error::Config(
            "the stochastic equation needs a noise model".into(),
        ));
    }
    integrate(
        Equation::Spde,
        problem,
        Some(driver),
        config,
        driver.mesh().end(),
    )
}

/// Controlled equation: the noise increments are replaced by `ḣ dt` of a piecewise-linear path.
pub fn solve_controlled<R: Real, P: DrivingPath>(
    problem: &ProblemSpec<R>,
    control: &P,
    config: &SolverConfig,
) -> Result<Trajectory<R>> {
    if problem.noise().is_none() {
        return Err(Error::Config(
            "the controlled equation needs a noise model".into(),
        ));
    }
    integrate(
        Equation::Controlled,
        problem,
        Some(control),
        config,
        control.mesh().end(),
    )
}

/// Deterministic NLS on `[0, horizon]`; any noise model is ignored.
pub fn solve_deterministic<R: Real>(
    problem: &ProblemSpec<R>,
    config: &SolverConfig,
    horizon: f64,
) -> Result<Trajectory<R>> {
    integrate::<R, IncrementPath>(Equation::Deterministic, problem, None, config, horizon)
}
