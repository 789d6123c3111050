//! Banded Cholesky factorization of finite-difference reaction-diffusion
//! systems, with full floating-point classification of the factor entries and
//! an analytic model that predicts — before factoring — how many entries will
//! be subnormal or underflow to zero, and where.
//!
//! The pieces:
//!
//! - [`mesh`]: uniform and Shishkin tensor meshes on the unit interval.
//! - [`problem`]: perturbation parameter and coefficient functions.
//! - [`assembly`]: the banded SPD system from the symmetrized 5-point
//!   stencil, in lexicographic order (bandwidth `m = N - 1`).
//! - [`cholesky`]: column-oriented band factorization in natural order, with
//!   an entry census (nonzeros / subnormals / underflow zeros) and a software
//!   flush-to-zero mode.
//! - [`fill_model`]: fill levels, magnitude classes, exact nonzero counts,
//!   and the predicted census.
//! - [`analyzer`]: diagonal magnitude profiles and predicted-vs-observed
//!   reports.
//! - [`cli`]: the `bandchol` command-line tool.
//!
//! Matrix values are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common double-precision instantiations.

pub mod analyzer;
pub mod assembly;
pub mod band;
pub mod cholesky;
pub mod cli;
pub mod error;
pub mod fill_model;
pub mod matrix_market;
pub mod mesh;
pub mod problem;
pub mod scalar;

pub use crate::error::{Error, Result};
pub use crate::scalar::Scalar;

/// Double-precision mesh.
pub type Mesh64 = mesh::Mesh1D<f64>;
/// Double-precision problem data.
pub type Problem64 = problem::ProblemSpec<f64>;
/// Double-precision system matrix.
pub type Matrix64 = assembly::BandedSymmetricMatrix<f64>;
/// Double-precision right-hand side.
pub type Rhs64 = assembly::RightHandSide<f64>;
/// Double-precision factor.
pub type Factor64 = cholesky::CholeskyFactor<f64>;
/// Double-precision diagonal profile.
pub type Profile64 = analyzer::DiagonalProfile<f64>;

/// Single-precision mesh.
pub type Mesh32 = mesh::Mesh1D<f32>;
/// Single-precision system matrix.
pub type Matrix32 = assembly::BandedSymmetricMatrix<f32>;
/// Single-precision factor.
pub type Factor32 = cholesky::CholeskyFactor<f32>;
