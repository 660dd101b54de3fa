//! Error type shared by all kernel and dynamics operations.

use thiserror::Error;

/// Errors produced by the matrix kernel, the game model, the learning
/// dynamics, and the separable-state oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// An operand has a dimension incompatible with the operation.
    #[error("invalid dimensions: expected {expected}, got {got}")]
    InvalidDimensions { expected: usize, got: usize },

    /// A matrix fails a Hermiticity check.
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    /// A matrix fails a positive-semidefiniteness check.
    #[error("matrix is not PSD (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    /// Projection to the density manifold found nothing left after clipping.
    #[error("degenerate state: clipped spectrum has trace {trace:e}")]
    DegenerateState { trace: f64 },

    /// An operation needed a strictly positive density but got a singular one.
    #[error("singular state: min eigenvalue {min_eigenvalue:e} too small for this metric parameter")]
    SingularState { min_eigenvalue: f64 },

    /// The discrete multiplicative update requires a positive definite game operator.
    #[error("lin-MMWU requires a positive definite game operator (min eigenvalue {min_eigenvalue:e})")]
    RequiresPdGame { min_eigenvalue: f64 },

    /// A multiplicative-update denominator collapsed to zero.
    #[error("degenerate utility {value:e} in multiplicative update")]
    DegenerateUtility { value: f64 },

    /// The dynamics reported a better value than the oracle's ground truth.
    #[error("oracle inconsistency: dynamics value {dyn_value} exceeds oracle value {oracle_value}")]
    OracleInconsistency { dyn_value: f64, oracle_value: f64 },

    /// Bloch coordinates are only defined for 2x2 densities.
    #[error("unsupported dimension {dim}: Bloch coordinates require dimension 2")]
    UnsupportedDimension { dim: usize },

    /// A scalar argument is outside its documented domain.
    #[error("invalid input: {reason}")]
    InvalidInput { reason: &'static str },
}

pub type Result<T> = core::result::Result<T, CoreError>;
