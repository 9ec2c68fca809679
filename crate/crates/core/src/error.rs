use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must have even dimension 2g, got {0}")]
    OddDimension(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-integral entries")]
    NotIntegral,

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("matrix is singular")]
    Singular,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a point of the Siegel upper half space: {0}")]
    NotInSiegelSpace(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("truncation tail estimate {estimate:e} exceeds target {target:e}")]
    Truncation { estimate: f64, target: f64 },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unverified evidence: {0}")]
    Unverified(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
