use std::fmt;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// A parameter violates its domain (wrong range, wrong family, ...).
    InvalidParameter(String),
    /// Vector/matrix shapes do not line up.
    ShapeMismatch { expected: usize, got: usize },
    /// The requested problem lies outside the solvable parameter region;
    /// carries the classification verdict or admissibility report.
    OutOfScope(String),
    /// An iterative solver failed to converge; carries a trace summary.
    NonConvergence(String),
    /// An assembled object violates one of its structural invariants.
    Invariant(String),
    /// I/O failure (matrix cache, report emission).
    Io(std::io::Error),
    /// Malformed configuration or cache file.
    Format(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected}, got {got}")
            }
            Error::OutOfScope(msg) => write!(f, "out of scope: {msg}"),
            Error::NonConvergence(msg) => write!(f, "no convergence: {msg}"),
            Error::Invariant(msg) => write!(f, "invariant violation: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
