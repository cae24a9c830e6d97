//! Exact workbench for linear rank inequalities over subspaces of `GF(p)^d`.
//!
//! Everything here is pure and allocation-only (`no_std` + `alloc`):
//!
//! - [`field`] and [`matrix`]: prime-field arithmetic and exact row reduction.
//! - [`subspace`]: canonical subspaces and the rank functionals `H`, `H(.|.)`, `I`.
//! - [`expr`]: rank/information inequalities, their evaluation, the built-in
//!   catalog (Shannon, Ingleton, T8, non-T8) and counterexample search.
//! - [`matroid`]: vector matroids, bases and circuits.
//! - [`network`]: constraint networks, linear codes, and capacity bounds.
//! - [`entropy`]: Shannon entropies of finite joint distributions.
//!
//! File formats, the parallel search driver and the CLI live in the `rankineq`
//! crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod entropy;
pub mod error;
pub mod expr;
pub mod field;
pub mod matrix;
pub mod matroid;
pub mod network;
pub mod subspace;

pub use error::{Error, Result};
pub use field::PrimeField;
pub use matrix::Matrix;

/// Exact rational scalar used for inequality coefficients, residuals and code literals.
pub type Rational = num_rational::Ratio<i64>;
