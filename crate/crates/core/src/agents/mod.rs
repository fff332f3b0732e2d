//! Learning agents: DDPG for continuous set-points, and tabular Q-learning,
//! SARSA and DQN baselines over a discrete set-point table.

mod action_table;
mod checkpoint;
mod ddpg;
mod dqn;
mod noise;
mod replay;
mod tabular;
mod training;

pub use action_table::{build_action_table, DiscreteActionTable, LevelRange};
pub use checkpoint::{manifest_kind, read_manifest, write_manifest, MANIFEST_FILE};
pub use ddpg::{DdpgAgent, DdpgConfig};
pub use dqn::{DqnAgent, DqnConfig};
pub use noise::{LinearSchedule, OuNoise};
pub use replay::{ReplayBuffer, Transition};
pub use tabular::{tabular_target, QTable, TabularAlgo, TabularConfig};
pub use training::{
    decode_action, derive_seed, encode_action, encode_state, evaluate_policy, state_key, train_ddpg, train_dqn,
    train_tabular, trailing_average, write_metrics_csv, EpisodeMetrics, Evaluation, Policy, METRICS_HEADER,
};

use thiserror::Error;

use crate::envsim::EnvError;
use crate::numerics::NetError;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid agent configuration: {0}")]
    InvalidConfig(String),
    #[error("replay buffer holds {have} transitions, need {need}")]
    InsufficientReplay { have: usize, need: usize },
    #[error("empty minibatch")]
    EmptyBatch,
    #[error("non-finite {0} loss")]
    NonFiniteLoss(&'static str),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
