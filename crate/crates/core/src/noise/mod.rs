//! Brownian drivers, interpolated and Cameron-Martin paths, stochastic
//! integrals and spatial noise profiles.

mod amplitude;
mod control;
mod driver;
mod integrals;
mod interp;
mod mesh;
mod model;
mod profile;

pub use amplitude::TimeAmplitude;
pub use control::CameronMartinControl;
pub(crate) use driver::read_numeric_csv;
pub use driver::{sample_driver, stream_key, BrownianDriver, DrivingPath, IncrementPath};
pub use integrals::{ito_integral, pathwise_integral};
pub use interp::{interpolate_adapted, AdaptedInterpolation};
pub(crate) use mesh::integer_ratio;
pub use mesh::TimeMesh;
pub use model::{NoiseChannel, NoiseModel, DECAY_TOLERANCE};
pub use profile::{make_bump_profile, NoiseProfile};
