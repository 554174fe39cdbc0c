//! Periodic grids, complex fields, Fourier multipliers and space-time norms.

mod field;
mod fourier;
mod grid;
mod multiplier;
pub mod norms;
mod series;

pub use field::ComplexField;
pub use fourier::{from_spectrum, to_spectrum, Fourier, SpectralTables};
#[allow(unused_imports)]
pub(crate) use grid::norm_sq3;
pub use grid::TorusGrid;
pub use multiplier::{
    apply_multiplier, free_evolve, gradient, laplacian, Sign, SpectralMultiplier,
};
#[allow(unused_imports)]
pub(crate) use multiplier::{apply_with, gradient_with};
pub use norms::{
    exotic_norm, local_smoothing_norm, lp_norm, mixed_spacetime_norm, sobolev_spacetime_norm,
    ExoticSpace,
};
pub use series::SpaceTimeSeries;
