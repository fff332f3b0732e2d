//! Experiment orchestration: configuration, training runs, parameter sweeps
//! and agent comparisons, all persisted as CSV and JSON artifacts.

mod config;
mod run;
mod sweep;

pub use config::{Algo, ComfortSpec, ExperimentConfig, SweepParam, WeatherSpec, CONFIG_KEYS};
pub use run::{
    build_env, evaluate_checkpoint, prepare_comfort, read_metrics_csv, read_trajectory_csv, run_experiment, summarize,
    summary_from_dir, RunArtifacts, RunSummary, TrainedAgent, FAILURE_MARKER,
};
pub use sweep::{compare_agents, sweep, CompareRow, SweepRow, COMPARE_HEADER, CURVES_HEADER, SWEEP_HEADER};

use thiserror::Error;

use crate::agents::AgentError;
use crate::comfort::ComfortError;
use crate::envsim::EnvError;
use crate::numerics::NetError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("csv {path}: {reason}")]
    Csv { path: String, reason: String },
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Comfort(#[from] ComfortError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "config",
            HarnessError::Csv { .. } => "csv",
            HarnessError::Agent(AgentError::Checkpoint(_)) | HarnessError::Net(NetError::Checkpoint(_)) => "checkpoint",
            HarnessError::Net(NetError::Version(_)) => "checkpoint_version",
            HarnessError::Agent(AgentError::NonFiniteLoss(_)) | HarnessError::Env(EnvError::Diverged) => "divergence",
            HarnessError::Agent(_) => "agent",
            HarnessError::Env(_) => "env",
            HarnessError::Comfort(_) => "comfort",
            HarnessError::Net(_) => "network",
            HarnessError::Json(_) => "json",
            HarnessError::Io(_) => "io",
        }
    }
}
