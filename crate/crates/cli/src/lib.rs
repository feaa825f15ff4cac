//! Library layer of the psibound command line tool: command implementations,
//! the report document, and CSV ingestion. The binary in `main.rs` only
//! parses flags and maps errors to exit codes.

use thiserror::Error;

pub mod commands;
pub mod csvio;
pub mod report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] psibound::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 = input error, 3 = internal numeric failure
    /// (2, domination failure, is decided by the simulate command itself).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(psibound::Error::NumericFailure(_)) => 3,
            _ => 1,
        }
    }
}

/// Exit code for a failed bound-domination check.
pub const EXIT_DOMINATION_FAILURE: i32 = 2;
