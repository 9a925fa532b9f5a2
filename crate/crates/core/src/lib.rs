//! Triangular cross-diffusion systems of competing species.
//!
//! The crate covers the Lotka-Volterra kinetics, the avoidance, hiding and
//! starvation diffusivities with their fast-reaction parents, linear Turing
//! analysis, a 1D Neumann method-of-lines integrator, fast-reaction
//! convergence sweeps and post-processing of simulated patterns.

// `!(x > 0.0)` rejects NaN on purpose; index loops follow the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod config;
pub mod convergence;
pub mod diffusivity;
pub mod error;
pub mod kinetics;
pub mod model;
pub mod pde;
pub mod roots;
pub mod turing;

pub use error::{Error, Result};
