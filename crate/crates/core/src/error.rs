use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors shared by all estimators and generators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix that must be positive definite failed its Cholesky check.
    /// Carries the 0-based pivot index at which factorization broke down.
    NotPositiveDefinite { pivot: usize },
    /// An iterative solver ran out of its iteration budget.
    NonConvergence { context: &'static str, residual: f64 },
    /// Dimension mismatch between two inputs.
    DimensionMismatch { expected: usize, got: usize },
    /// A parameter outside its documented domain.
    InvalidArgument(String),
    /// Too many work units of a study failed to produce a usable aggregate.
    TooManyFailures { failed: usize, total: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            Error::NonConvergence { context, residual } => {
                write!(f, "{context} did not converge (residual {residual:e})")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::TooManyFailures { failed, total } => {
                write!(f, "{failed} of {total} work units failed")
            }
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
