//! Exact spectra and eigenvectors of XY spin-1/2 chains and rings with
//! k-periodic Larmor frequencies and couplings, in the one-magnon sector.
//!
//! * [`linalg`]: tridiagonal determinants, Hermitian Jacobi eigensolver,
//!   inverse-tridiagonal entries.
//! * [`model`]: parameters and all model matrices.
//! * [`solver`]: closed-form eigensystems and the dense reference solver.
//! * [`compare`]: chain/ring spectrum partition, determinant identity and
//!   eigenvector projection checks.
//! * [`dynamics`]: one-magnon propagators and boundary divergence.
//! * [`cli`]: command-line front end.

// `!(x > guard)` is used on purpose so that NaN takes the guarded branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compare;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod solver;

pub use error::{Error, Result};
