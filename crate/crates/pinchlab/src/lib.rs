//! pinchlab: a desk-scale numerical laboratory for pinching-type operator
//! inequalities.
//!
//! The crate verifies, over randomized and hand-constructed instances, the
//! generalized and reverse pinching inequalities for weighted conjugation
//! sums, the weight spectrahedra behind them (with both a direct eigenvalue
//! membership test and a recursive Schur-complement polynomial criterion),
//! and the ordered gentle-measurement bounds of the binary case.
//!
//! Modules:
//! - [`matrix`]: complex matrices, the Loewner-order primitives, tolerance policy.
//! - [`spectrahedron`]: membership tests and boundary samplers for the weight sets.
//! - [`pinching`]: pinching maps, conjugation sums, inequality verifiers, converse witness.
//! - [`gentle`]: binary two-sided bounds and the gentle-measurement reports.
//! - [`harness`]: seeded instance generation and verification campaigns.

pub mod error;
pub mod gentle;
pub mod harness;
pub mod matrix;
pub mod pinching;
mod randutil;
pub mod spectrahedron;

pub use error::{Error, Result};
pub use matrix::{
    all_ones, hermitize, is_psd, loewner_leq, trace_norm, ComplexMatrix, LoewnerVerdict, Tolerance,
};
pub use spectrahedron::{MembershipVerdict, WeightVector};
