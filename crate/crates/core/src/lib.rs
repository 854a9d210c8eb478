//! Rényi heterogeneity and its relatives.
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: log-gamma, beta density, (generalized) regularized incomplete
//!   beta and the regularized `3F2` series at unit argument.
//! - [`renyi`]: categorical Rényi heterogeneity (Hill numbers) and the family of
//!   indices that are monotone transforms of it.
//! - [`decomposition`]: pooled / within / between heterogeneity of a weighted
//!   ensemble of distributions.
//! - [`classic`]: Rao's quadratic entropy, its numbers equivalent, functional
//!   Hill numbers, the Leinster–Cobbold index, metric predicates and the
//!   parametric three-state system.
//! - [`categorical`]: heterogeneity of soft categorical assignments.
//! - [`gaussian`]: heterogeneity of Gaussian latent representations.
//! - [`bmm`]: the two-component beta mixture testbed.

pub mod bmm;
pub mod categorical;
pub mod classic;
pub mod decomposition;
mod error;
pub mod gaussian;
mod linalg;
mod order;
pub mod renyi;
pub mod special;

pub use error::{HetError, Result};
pub use order::Order;
pub use renyi::Distribution;

/// Tolerance used when checking that probabilities or weights sum to one.
pub const SUM_TOLERANCE: f64 = 1e-9;
