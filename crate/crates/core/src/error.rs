use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter lies outside the distribution's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An index lies outside the range an operation is defined on.
    #[error("range error: index {index} outside [{lo}, {hi}]")]
    Range { index: usize, lo: usize, hi: usize },
    /// An operation was asked for on an empty index range (for example a ratio with m = 1).
    #[error("range error: {0} is empty for m = {1}")]
    EmptyRange(&'static str, usize),
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
