//! Error type shared by every module of the crate.

use std::fmt;

/// Errors produced by value-dependent failures.
///
/// Programmer errors (mismatched truncation orders, too few marked points)
/// panic via `assert!` instead; only data-dependent conditions surface here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input lies outside the mathematical domain of the operation
    /// (e.g. `m > m_c`, zero constant term, argument on a branch cut).
    Domain(String),
    /// The requested accuracy cannot be met with the given parameters.
    Accuracy(String),
    /// An iterative method failed to converge or a fit is ill-conditioned.
    Numeric(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Accuracy(msg) => write!(f, "accuracy error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
