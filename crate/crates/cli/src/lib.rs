//! Command-line front end for the `pok` library.

pub mod cli;
pub mod commands;
pub mod output;

use thiserror::Error;

pub use cli::{run, Cli};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pok::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_CONJECTURE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_precision() => EXIT_PRECISION,
            CliError::Core(_) | CliError::Usage(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}
