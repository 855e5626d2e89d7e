use std::path::PathBuf;

use thiserror::Error;

use expburgers::asymptotics::{BalanceError, DiscrepancyError, PipelineError};
use expburgers::exact::ExactError;
use expburgers::experiments::ExperimentError;
use expburgers::solver::SolverError;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
    #[error("exact engine: {0}")]
    Exact(#[from] ExactError),
    #[error("extrapolation failed at {0}")]
    Pipeline(#[from] PipelineError),
    #[error("discrepancy: {0}")]
    Discrepancy(#[from] DiscrepancyError),
    #[error("input {path}, line {line}: {reason}")]
    Input {
        path: String,
        line: u64,
        reason: String,
    },
    #[error("{} exists; pass --force to overwrite", .0.display())]
    Exists(PathBuf),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// 2 config or input, 3 solver, 4 term cap, 5 transform, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Exact(ExactError::TermCap { .. }) => 4,
            CliError::Exact(ExactError::EmptyRange) | CliError::Input { .. } => 2,
            CliError::Pipeline(_) | CliError::Discrepancy(_) => 5,
            CliError::Exists(_) | CliError::Io { .. } | CliError::Other(_) => 1,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Solver(e) => e.into(),
            ExperimentError::Exact(e) => e.into(),
            ExperimentError::Pipeline(e) => e.into(),
            ExperimentError::Discrepancy(e) => e.into(),
            ExperimentError::EmptyBand => CliError::Other(e.to_string()),
        }
    }
}

impl From<BalanceError> for CliError {
    fn from(e: BalanceError) -> Self {
        let key = match e {
            BalanceError::MinimumCondition { .. } => "alpha",
            BalanceError::Unsupported(_) => "family",
            BalanceError::NoDoubling => "n_max",
            BalanceError::Symbol(_) => "family",
        };
        ConfigError::key(key, e.to_string()).into()
    }
}
