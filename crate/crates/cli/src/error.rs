use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INVALID_CONFIG: i32 = 2;
    pub const RUNTIME: i32 = 3;
    pub const TOLERANCE: i32 = 4;
    pub const CONFIG_NOT_FOUND: i32 = 5;
    pub const CONFIG_PARSE: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config file {0} not found")]
    ConfigNotFound(PathBuf),

    #[error("cannot parse config file {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    Runtime(String),

    #[error("{0} comparison row(s) outside tolerance")]
    Tolerance(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigNotFound(_) => exit::CONFIG_NOT_FOUND,
            CliError::ConfigParse { .. } => exit::CONFIG_PARSE,
            CliError::InvalidConfig(_) => exit::INVALID_CONFIG,
            CliError::Runtime(_) => exit::RUNTIME,
            CliError::Tolerance(_) => exit::TOLERANCE,
        }
    }
}

impl From<semcom_core::Error> for CliError {
    fn from(e: semcom_core::Error) -> Self {
        CliError::InvalidConfig(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
