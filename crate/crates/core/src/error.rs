use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input data is malformed: non-finite entries, non-Hermitian matrices,
    /// spectra that do not sum to one, and so on.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A document could not be parsed; the message names the offending field
    /// and position.
    #[error("parse error: {0}")]
    Parse(String),
    /// A caller broke an operation's precondition (bad index, dead pair,
    /// missing subsystem metadata, mismatched dimensions).
    #[error("contract violation: {0}")]
    Contract(String),
    /// An iterative routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Rejection sampling gave up.
    #[error("sampling failure: {0}")]
    Sampling(String),
    /// The problem is larger than an exhaustive routine supports.
    #[error("unsupported size: {what} = {value} exceeds cap {cap}")]
    UnsupportedSize { what: &'static str, value: usize, cap: usize },
    /// Internal bookkeeping disagreed with itself.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
