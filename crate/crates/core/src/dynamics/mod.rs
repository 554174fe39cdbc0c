//! Splitting integrators for the stochastic equation, its controlled and
//! deterministic counterparts, and the gauge-transformed random equation.

mod equivalence;
mod problem;
mod random_pde;
mod solve;
mod stepper;
mod substeps;
mod trajectory;

pub use equivalence::{
    equivalence_deviation, fitted_order, rescaling_equivalence, EquivalenceReport,
};
pub use problem::{Criticality, ProblemInfo, ProblemSpec, Scheme, SolverConfig};
pub use random_pde::{
    pullback_homogeneous, solve_random_pde, solve_random_pde_forced, TRANSPORT_CFL_LIMIT,
};
pub(crate) use solve::solver_mesh;
pub use solve::{solve_controlled, solve_deterministic, solve_spde};
pub use substeps::{substep_linear, substep_noise, substep_nonlinear};
pub use trajectory::{Equation, RunStatus, Trajectory};
