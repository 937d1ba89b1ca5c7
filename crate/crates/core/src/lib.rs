//! Frames with prescribed norms and frame operator.
//!
//! The crate decides whether a positive operator `S` and a sequence of
//! squared norms `c` admit a frame whose frame operator is `S` and whose
//! vectors satisfy `‖f_k‖² = c_k`, and builds such frames when it can.
//!
//! The decision machinery rests on the majorization functionals
//! `U_k` (largest sum of `k` entries / largest trace of `S` against a rank-`k`
//! projection) and `L_k` (the smallest), evaluated exactly for finite data and
//! with certified error bounds for structured infinite sequences.
//!
//! Module map:
//! - [`sequences`]: sequence models, `U_k`/`L_k` on sequences, majorization.
//! - [`operators`]: finite symmetric matrices and diagonal operators,
//!   essential bounds, `S⁺`/`S₋`, and `U_k`/`L_k` on operators.
//! - [`schur_horn`]: orthogonal conjugations realizing a prescribed diagonal.
//! - [`frames`]: frame operator, bounds, excess, verification.
//! - [`admissibility`]: decisive finite tests and the infinite-dimensional
//!   necessary/sufficient trichotomy.
//! - [`synthesis`]: exact finite synthesis, tail-absorbing truncation, and the
//!   head decomposition with greedy extension.
//! - [`formats`]: JSON schemas for sequences, operators, frames and reports.
//! - [`fixtures`] and [`cli`]: named worked examples and the command line.

pub mod admissibility;
pub mod cli;
pub mod error;
pub mod evidence;
pub mod fixtures;
pub mod formats;
pub mod frames;
pub mod operators;
pub mod schur_horn;
pub mod sequences;
pub mod synthesis;
pub mod tol;

pub use error::{Error, Result};
