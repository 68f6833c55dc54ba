use std::path::PathBuf;

/// Errors raised by the filters, generators and the benchmark harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on the arguments was not met.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iterative numerical routine failed; `last` is the final iterate.
    #[error("numerical failure: {message} (last iterate {last})")]
    Numerical { message: String, last: f64 },

    /// A filter produced a non-finite prediction, error or coefficient.
    #[error("divergence at step {step}: |error| = {magnitude}")]
    Divergence { step: usize, magnitude: f64 },

    #[error("ingestion error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Ingestion { line: Option<usize>, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
