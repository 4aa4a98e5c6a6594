//! Discrete Dirac-harmonic maps with curvature term into round spheres,
//! on the flat unit torus.
//!
//! The crate provides the field calculus ([`grid`]), spinors and Dirac
//! operators ([`clifford`]), the sphere target with energy and
//! Euler-Lagrange residuals ([`sphere`]), a constrained gradient-flow
//! solver with seed configurations ([`solver`]), and numerical audits of
//! the identities and a-priori estimates satisfied by solutions
//! ([`estimates`]).

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod error;
pub mod estimates;
pub mod grid;
pub mod io;
pub mod random;
pub mod solver;
pub mod sphere;

pub use error::{LabError, Result};

/// Crate version, echoed in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
