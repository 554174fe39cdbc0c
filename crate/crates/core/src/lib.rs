//! Pseudo-spectral simulation and verification laboratory for stochastic
//! nonlinear Schrödinger equations with linear multiplicative noise,
//!
//! ```text
//! i dX = ΔX dt + λ|X|^{α-1}X dt - iμX dt + i Σ_k X G_k dβ_k,
//! ```
//!
//! in the defocusing mass-critical (`α = 1 + 4/d`) and energy-critical
//! (`α = 1 + 4/(d-2)`) regimes, on a periodic box standing in for `R^d`.
//!
//! The numerical core is generic over the scalar type ([`Real`], `f32` or
//! `f64`); the aliases at the crate root fix it to `f64`.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod codec;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod noise;
pub mod observables;
pub mod real;
pub mod rescaling;
pub mod spectral;

pub use error::{Error, Result};
pub use real::Real;

pub type Grid = spectral::TorusGrid<f64>;
pub type Field = spectral::ComplexField<f64>;
pub type Series = spectral::SpaceTimeSeries<f64>;
