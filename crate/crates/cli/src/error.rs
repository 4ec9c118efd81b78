use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] freshness_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 2 for invalid input, 3 for a degenerate model, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(freshness_core::Error::ModelDegenerate(_)) => 3,
            CliError::Model(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}
