use std::path::Path;

use thiserror::Error;

/// CLI failures, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Missing or malformed input: exit code 2.
    #[error("{0}")]
    Input(String),
    /// A numerical or consistency check failed: exit code 3.
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 2,
        }
    }

    pub fn read(path: &Path, err: std::io::Error) -> Self {
        CliError::Input(format!("cannot read {}: {err}", path.display()))
    }

    pub fn parse(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }
}

impl From<qgraph::Error> for CliError {
    fn from(e: qgraph::Error) -> Self {
        match e {
            qgraph::Error::InvalidInput(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
