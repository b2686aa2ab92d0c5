use std::path::PathBuf;

use thiserror::Error;

/// Failures of a command, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Data(String),

    #[error("{0}")]
    NonConvergence(String),

    #[error(transparent)]
    Library(#[from] qlognorm::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use qlognorm::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Data(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::Library(e) => match e {
                E::InvalidParameter(_) | E::Domain { .. } => 2,
                E::NonConvergence { .. } => 4,
                E::Degenerate(_) | E::Divergent(_) | E::InsufficientData(_) | E::UnsupportedPoint { .. } => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
