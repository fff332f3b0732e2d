//! Thermal-comfort prediction: the Fanger PMV oracle, synthetic and CSV
//! comfort datasets, and the neural predictor used by the environment.

mod dataset;
mod model;
mod pmv;

pub use dataset::{
    generate_dataset, load_dataset, save_dataset, ComfortSample, GridSpec, DATASET_HEADER, VOTE_LIMIT,
};
pub use model::{
    evaluate_mse, predict_comfort, regularized_cost, train_comfort_model, ComfortDefaults, ComfortModel,
    ComfortTrainConfig, ComfortTrainReport, FEATURES,
};
pub use pmv::{pmv_oracle, ComfortInputs, PMV_CLAMP};

use thiserror::Error;

use crate::numerics::NetError;

#[derive(Debug, Error)]
pub enum ComfortError {
    #[error("{name} = {value} outside admissible range [{lo}, {hi}]")]
    OutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("clothing temperature did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("sampling grid is empty")]
    EmptyGrid,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("need at least 10 samples, got {0}")]
    TooFewSamples(usize),
    #[error("train/test split left an empty partition")]
    EmptySplit,
    #[error("empty sample list")]
    EmptySamples,
    #[error("non-finite training cost at epoch {0}")]
    NonFiniteCost(usize),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
