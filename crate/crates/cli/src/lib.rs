//! Experiment harness for the entrate estimator: configuration,
//! experiment drivers, CSV persistence, and the built-in validation suite.

pub mod config;
pub mod experiments;
pub mod io;
pub mod validate;

use thiserror::Error;

/// Harness-level error, carrying the process exit code convention:
/// 2 for config/parse problems, 1 for everything else.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("input error: {0}")]
    Parse(#[from] io::ParseError),

    #[error(transparent)]
    Core(#[from] entrate::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Parse(_) => 2,
            _ => 1,
        }
    }
}
