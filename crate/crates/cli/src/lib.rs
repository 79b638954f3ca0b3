//! Command implementations behind the `stringency` binary.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] stringency::Error),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for anything the user can fix in the configuration, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Model(stringency::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
