use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the command-line tools, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config values, or settings that contradict an index.
    #[error("{0}")]
    Usage(String),

    /// Unreadable, malformed or inconsistent input data.
    #[error("{0}")]
    Data(String),

    /// An oracle check found a violation.
    #[error("{0}")]
    Oracle(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Io { .. } => 2,
            CliError::Oracle(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<subregion::Error> for CliError {
    fn from(e: subregion::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
