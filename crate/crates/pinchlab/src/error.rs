//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by matrix construction, validation, and the verifiers.
///
/// Every constructor validates its invariants and reports violations here
/// instead of repairing the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("matrix dimensions must be positive")]
    EmptyMatrix,

    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },

    #[error("matrix dimensions {rows}x{cols} overflow the address space")]
    DimensionsTooLarge { rows: usize, cols: usize },

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("matrix is not Hermitian within the band (deviation {deviation:.3e}, allowed {allowed:.3e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("tolerances must be non-negative")]
    NegativeTolerance,

    #[error("weight vector arity must be at least 2, got {0}")]
    ArityTooSmall(usize),

    #[error("expected arity {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("boundary completion requires a strictly interior prefix")]
    PrefixNotInterior,

    #[error("parameter must be positive, got {0}")]
    NonPositiveParameter(f64),

    #[error("projector {index} failed validation: {reason}")]
    InvalidProjector { index: usize, reason: String },

    #[error("projectors do not sum to the identity (deviation {deviation:.3e})")]
    PovmSumNotIdentity { deviation: f64 },

    #[error("a projective measurement needs at least 2 projectors, got {0}")]
    PovmTooSmall(usize),

    #[error("projector {0} is zero; this operation requires a nontrivial measurement")]
    TrivialProjector(usize),

    #[error("an operator family needs at least 2 members, got {0}")]
    FamilyTooSmall(usize),

    #[error("state is not positive semidefinite within the band (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("epsilon must lie in [0, 1], got {0}")]
    EpsilonOutOfRange(f64),

    #[error("epsilon = 0 but the off-support block is nonzero (norm {0:.3e})")]
    DegenerateEpsilon(f64),

    #[error("hypothesis violated: 1 - Tr(rho P) = {observed:.6e} exceeds epsilon = {epsilon:.6e}")]
    HypothesisViolated { observed: f64, epsilon: f64 },

    #[error("measurement partition requires 2 <= n <= d, got n = {n}, d = {d}")]
    BadPartition { n: usize, d: usize },

    #[error("invalid campaign config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
