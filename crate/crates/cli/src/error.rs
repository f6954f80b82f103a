use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("thread pool: {0}")]
    Threads(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] precursor_core::Error),
}

impl CliError {
    /// Process exit status: 2 for a failed computation, 1 for everything the
    /// user can fix in the config or the environment.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
