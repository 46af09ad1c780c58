//! Weighted power means, ratio-of-differences bounds and their sharp constants.
//!
//! The crate evaluates weighted power means and the functional
//! `Δ = |(M_r^α − M_t^α) / (M_r^α − M_s^α)|`, checks the Diananda-type
//! inequalities that bound it in terms of the minimum weight, solves for the
//! parameter thresholds at which those bounds stop holding, and searches
//! configuration space for extremal and violating configurations.
//!
//! Batch work (random suites, grid sign checks, search restarts) runs through
//! [`Execution`], which uses rayon when the `parallel` feature is enabled and
//! falls back to a plain loop otherwise. Results are identical either way.

pub mod cli;
pub mod error;
pub mod exec;
pub mod inequalities;
pub mod means;
pub mod numeric;
pub mod proof_aux;
pub mod search;
pub mod thresholds;
pub mod tolerance;

pub use error::{Error, Result};
pub use exec::Execution;
pub use inequalities::{check, equality_witness, CheckOptions, CheckParams, CheckReport, InequalityId, Status};
pub use means::{c_constant, delta, order_triple, power_mean, variance_sigma, Configuration, DeltaParams, MeanValue};
pub use tolerance::Tolerance;
