use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A scalar argument fell outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A vector input violated a structural invariant (length, sign, normalization).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The distribution puts positive mass on fewer than two distinct support values.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    /// A shifted parameter vector would have a negative entry.
    #[error("invalid parameter shift: {0}")]
    InvalidShift(String),

    /// No grid point satisfies the mean constraint at the requested resolution.
    #[error("infeasible grid: {0}")]
    InfeasibleGrid(String),

    /// An iterative routine failed to reach its stopping criterion.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// An operation that needs at least one observation received none.
    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;
