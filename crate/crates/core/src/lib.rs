//! Numerical engine for consistent histories on one or two spin-½ systems.
//!
//! The crate builds spin states and projectors, evolves them under
//! piecewise-constant Hamiltonians, decides whether a family of histories is a
//! consistent framework, assigns Born-rule probabilities inside a framework,
//! refuses questions that mix incompatible frameworks, and compares singlet
//! correlations with local hidden-variable models.

pub mod bell;
pub mod dynamics;
pub mod error;
pub mod frameworks;
pub mod histories;
pub mod linalg;
pub mod scenario;
pub mod spin;

pub use error::{Error, Incompatibility, Result};
pub use linalg::{EPS_CONS, EPS_NORM, EPS_OP};
