use thiserror::Error;

/// Errors raised across the library.
///
/// The variants line up with the CLI exit codes: validation-type problems
/// (`Domain`, `Precondition`, `UnsupportedParameter`, `Validation`,
/// `Consistency`, `Degenerate`) exit with 2, `Capacity` with 3 and
/// `Accuracy` with 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} = {value} (cap {cap})")]
    Capacity { what: &'static str, value: u64, cap: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("degenerate mollifier: {0}")]
    Degenerate(String),

    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    #[error("accuracy target missed: {0}")]
    Accuracy(String),

    #[error("invalid mollifier spec: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
