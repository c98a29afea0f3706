//! Command-line orchestration for the resonance toolkit: config ingestion,
//! report persistence and the `verify` battery.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use resonance_core::ladder::LadderError;
use resonance_core::operator::OperatorError;
use resonance_core::solve::SolveError;
use thiserror::Error;

pub use cli::{Cli, Command};
pub use config::ExperimentConfig;
pub use output::{emit_plot_data, RunContext, RunManifest};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}

impl From<LadderError> for CliError {
    fn from(e: LadderError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::NonConvergence { .. } | OperatorError::Linalg(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Domain(_) => CliError::Usage(e.to_string()),
            SolveError::Operator(inner) => inner.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
