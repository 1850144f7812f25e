use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter lies outside its admissible range.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// A function was evaluated outside its domain of definition.
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// Grid or solver configuration is inconsistent (CFL, Courant ratio, stride).
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical blow-up detected at step {step}")]
    Blowup { step: usize },

    #[error("Picard iteration did not converge in {iterations} iterations (last change {last_change:e})")]
    IterationLimit { iterations: usize, last_change: f64 },

    /// A sampling region contains no grid node.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
