//! File formats, table rendering, the parallel simulation driver and the
//! command line front end for the `varest-core` estimators.

use std::path::PathBuf;

pub mod cli;
pub mod io;
pub mod parallel;
pub mod report;

/// Errors of the IO and CLI layer, each mapped to a process exit code:
/// usage errors exit 1, data and numerical errors exit 2, and a breakdown
/// flag under `--strict` exits 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),

    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("{path}: line {line}: malformed row")]
    MalformedRow { path: PathBuf, line: usize },

    #[error("{path}: missing key `{key}`")]
    MissingKey { path: PathBuf, key: &'static str },

    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] varest_core::Error),

    #[error("breakdown flag present and --strict set")]
    StrictBreakdown,
}

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) => 1,
            Error::StrictBreakdown => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
