use thiserror::Error;

/// Errors raised by table lookups, series evaluation and the reference solver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A Stirling index exceeded the bound the table was built with.
    #[error("index {requested} exceeds the {table} table bound max_n = {bound}")]
    Capacity {
        table: &'static str,
        requested: usize,
        bound: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// The series exists only for a restricted parameter (for example `alpha = 1`).
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("solver did not converge: {message}")]
    Solver { message: String, trace: Vec<String> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("output error: {0}")]
    Io(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
