use thiserror::Error;

/// Errors produced by the selection library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    /// A synthetic division by `(x - 1)` left a remainder above tolerance.
    #[error("deflation failed: remainder {remainder:e} exceeds {tolerance:e}")]
    DeflationFailure { remainder: f64, tolerance: f64 },

    #[error("polynomial has no real root in its Cauchy bracket")]
    NotRealRooted,

    #[error("algorithm failure at iteration {iteration}: {message}")]
    AlgorithmFailure { iteration: usize, message: String },

    #[error("enumeration of {count} subsets exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
