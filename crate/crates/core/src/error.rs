use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("memory parameter p = {0} is outside [0, 1]")]
    InvalidMemory(f64),

    #[error("horizon must be at least 1 step")]
    EmptyHorizon,

    #[error("horizon {n} exceeds the cap of {cap} steps")]
    HorizonTooLarge { n: u64, cap: u64 },

    #[error("urn is empty: transition law needs at least one ball")]
    EmptyUrn,

    #[error("sample of size {got} is too small, need at least {need}")]
    SampleTooSmall { got: usize, need: usize },

    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),

    #[error("degenerate expected distribution: {0}")]
    DegenerateExpected(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 3 for file-system and serialisation failures, 2
    /// for everything the caller could have avoided.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Json(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_memory(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidMemory(p))
    }
}
