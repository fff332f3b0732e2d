//! Dense feed-forward networks with exact backpropagation, Adam, and
//! target-network blending.

mod adam;
mod checkpoint;
mod net;

pub use adam::{adam_step, soft_update, OptimState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use net::{finite_diff_gradient, Activation, DenseNet, ParamGradient, Trace};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("invalid network layout: {0}")]
    Layout(String),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("corrupt checkpoint: {0}")]
    Checkpoint(String),
    #[error("unsupported checkpoint version `{0}`")]
    Version(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Linear map from a physical interval onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeScaler {
    pub offset: f64,
    pub scale: f64,
}

impl RangeScaler {
    pub fn from_range(lo: f64, hi: f64) -> Self {
        let half = (hi - lo) / 2.0;
        Self {
            offset: lo + half,
            scale: if half > 0.0 { half } else { 1.0 },
        }
    }

    #[inline]
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.offset) / self.scale
    }

    #[inline]
    pub fn denormalize(&self, y: f64) -> f64 {
        self.offset + self.scale * y
    }
}
