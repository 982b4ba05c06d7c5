use alloc::string::String;

/// Errors reported by the core operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// A structural rule of an instance is violated. The message names the
    /// rule and the offending entry.
    #[error("{0}")]
    Invariant(String),
    #[error("enumeration needs {configurations} configurations, limit is {limit}")]
    SizeLimit { configurations: f64, limit: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no feasible assignment exists")]
    Infeasible,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
