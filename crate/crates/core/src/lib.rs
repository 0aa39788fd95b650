//! Numerical laboratory for the degenerate random conductance model on the
//! periodic lattice `Z_L^d`.
//!
//! The crate samples i.i.d. conductance environments with controllable tails,
//! solves corrector and flux-corrector equations on periodized boxes, computes
//! the random length-scales that govern large-scale ellipticity, and provides
//! the sensitivity calculus and ensemble estimators needed to probe CLT
//! scaling of corrector statistics at desk scale.
//!
//! Layout:
//! - [`env`]: conductance environments (sampling, truncation, resampling, moments)
//! - [`calculus`]: discrete vector calculus on the torus (gradients, balls, averages)
//! - [`solver`]: preconditioned CG for the weighted operator and a spectral Poisson solver
//! - [`corrector`]: correctors, fluxes, flux correctors, massive and auxiliary fields
//! - [`scales`]: random length-scales r_diamond / r_spade and inequality probes
//! - [`sensitivity`]: vertical derivatives, representation formulas, spectral-gap checks
//! - [`stats`]: ensemble orchestration, moment norms, growth curves, regression fits
//! - [`green`]: lattice Green-function differences and decay profiles

pub mod calculus;
pub mod corrector;
pub mod env;
pub mod error;
pub mod fft;
pub mod field;
pub mod green;
pub mod grid;
pub mod io;
pub mod report;
pub mod rng;
pub mod scales;
pub mod sensitivity;
pub mod solver;
pub mod stats;

pub use env::{Distribution, Environment, EnvironmentSpec};
pub use error::{Error, Result};
pub use field::{VectorField, VertexField};
pub use grid::{Ball, Torus};
pub use solver::SolveReport;
