//! Robust selection of sparse undirected graphical models.
//!
//! Estimates the support of a p x p concentration matrix from n observations
//! under three data models: Gaussian (graphical lasso), classical multivariate
//! t (one latent Gamma divisor per observation, fit by penalized EM) and an
//! alternative multivariate t with one divisor per coordinate (fit by a Monte
//! Carlo or variational penalized EM). Also ships the simulation generators
//! and the ROC/cross-validation/bootstrap harness used to compare the
//! estimators, all driven by explicit counter-based RNG streams so that every
//! run is bit-reproducible.
//!
//! The crate is `no_std`-compatible (requires `alloc`); file formats, CLI and
//! thread pools live in the companion `robustggm` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod fit;
pub mod glasso;
pub mod matrix;
pub mod rng;
pub mod simgen;
pub mod special;
pub mod tlasso;
pub mod tstar;
pub mod types;

pub use error::{Error, Result};
pub use matrix::{Mat, SymMatrix};
pub use types::{Dataset, EStepKind, FitConfig, FitResult, GraphEstimate, Method};

/// Entries of a fitted concentration matrix below this magnitude are treated
/// as zero when reading off graph edges. The lasso itself produces exact
/// zeros; EM wrappers accumulate round-off on top of them.
pub const EDGE_EPS: f64 = 1e-6;
