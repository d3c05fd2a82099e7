use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("series {id}: non-finite value at position {index}")]
    NonFinite { id: String, index: usize },

    #[error("series {id}: {msg}")]
    InvalidSeries { id: String, msg: String },

    #[error("invalid parameter {name}: {msg}")]
    InvalidParameter { name: &'static str, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in recursion at t={t}")]
    NonFiniteRecursion { t: usize },

    #[error("metric undefined: {0}")]
    Metric(String),

    #[error("sampler: {0}")]
    Sampler(String),

    #[error("optimizer did not converge after {restarts} restarts (best objective {best_objective})")]
    NoConvergence {
        restarts: usize,
        best_objective: f64,
        best: Box<crate::ets::EtsParams>,
    },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
