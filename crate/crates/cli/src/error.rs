use std::path::PathBuf;

use thiserror::Error;

/// Failures of a scenario run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Physics(String),

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
            CliError::Physics(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<nvcool_core::Error> for CliError {
    fn from(e: nvcool_core::Error) -> Self {
        use nvcool_core::Error as E;
        match e {
            E::InvalidConfig(_)
            | E::UnknownUnit { .. }
            | E::MissingKey(_)
            | E::Oblate { .. }
            | E::Json(_) => CliError::Config(e.to_string()),
            _ => CliError::Physics(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
