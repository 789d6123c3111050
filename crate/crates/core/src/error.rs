//! Crate-wide error type.

use std::fmt;
use std::io;

/// Errors produced by mesh construction, assembly, factorization, analysis,
/// and file I/O.
#[derive(Debug)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// The coefficient data violates the model assumptions
    /// (reaction coefficient below its stated lower bound).
    ModelViolation(String),
    /// Factorization hit a nonpositive pivot; the matrix is not positive
    /// definite. Reports the offending (0-based) column.
    NotPositiveDefinite { column: usize },
    /// A threshold equation has no solution for the given parameters.
    NoSolution(String),
    /// Malformed input file (Matrix Market or config).
    Format(String),
    /// Underlying I/O failure.
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ModelViolation(msg) => write!(f, "model violation: {msg}"),
            Error::NotPositiveDefinite { column } => {
                write!(
                    f,
                    "matrix is not positive definite (pivot in column {column})"
                )
            }
            Error::NoSolution(msg) => write!(f, "no solution: {msg}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::Io(err) => write!(f, "I/O error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
