use std::fs;
use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::{ComfortSample, VOTE_LIMIT};
use super::pmv::ComfortInputs;
use super::ComfortError;
use crate::numerics::{adam_step, Activation, DenseNet, NetError, OptimState, RangeScaler};

pub const FEATURES: usize = 6;

/// Values used for the comfort inputs that the controller does not observe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComfortDefaults {
    /// `None` means the radiant temperature follows indoor air temperature.
    pub mean_radiant_temp: Option<f64>,
    pub air_speed: f64,
    pub metabolic_rate: f64,
    pub clothing: f64,
}

impl Default for ComfortDefaults {
    fn default() -> Self {
        Self {
            mean_radiant_temp: None,
            air_speed: 0.1,
            metabolic_rate: 1.2,
            clothing: 0.5,
        }
    }
}

impl ComfortDefaults {
    pub fn inputs(&self, air_temp: f64, rel_humidity: f64) -> ComfortInputs {
        ComfortInputs {
            air_temp,
            rel_humidity,
            mean_radiant_temp: self.mean_radiant_temp.unwrap_or(air_temp),
            air_speed: self.air_speed,
            metabolic_rate: self.metabolic_rate,
            clothing: self.clothing,
        }
    }
}

/// Neural comfort predictor: 6 inputs, two sigmoid hidden layers, one linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct ComfortModel {
    net: DenseNet,
    scaling: [RangeScaler; FEATURES],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComfortTrainConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub epochs: usize,
    pub hidden: [usize; 2],
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for ComfortTrainConfig {
    fn default() -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 1e-4,
            epochs: 400,
            hidden: [32, 32],
            learning_rate: 3e-3,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Per-epoch training history.
#[derive(Debug, Clone, Default)]
pub struct ComfortTrainReport {
    /// Full regularized cost on the training split after each epoch.
    pub cost: Vec<f64>,
    /// Held-out mean squared error after each epoch.
    pub test_mse: Vec<f64>,
    /// Squared weight norm after each epoch.
    pub weight_sq_norm: Vec<f64>,
    /// Epoch (0-based) whose parameters were kept.
    pub best_epoch: usize,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

impl ComfortModel {
    pub fn new(net: DenseNet, scaling: [RangeScaler; FEATURES]) -> Result<Self, ComfortError> {
        let sizes = net.layer_sizes();
        let acts = net.activations();
        if sizes.len() != 4 || sizes[0] != FEATURES || sizes[3] != 1 {
            return Err(ComfortError::InvalidParameter(format!(
                "comfort network must be 6-h1-h2-1, got {sizes:?}"
            )));
        }
        if acts[0] != Activation::Sigmoid || acts[1] != Activation::Sigmoid || acts[2] != Activation::Linear {
            return Err(ComfortError::InvalidParameter(
                "comfort network must be sigmoid-sigmoid-linear".into(),
            ));
        }
        Ok(Self { net, scaling })
    }

    pub fn net(&self) -> &DenseNet {
        &self.net
    }

    pub fn scaling(&self) -> &[RangeScaler; FEATURES] {
        &self.scaling
    }

    fn scaled(&self, features: &[f64; FEATURES]) -> [f64; FEATURES] {
        let mut out = [0.0; FEATURES];
        for i in 0..FEATURES {
            out[i] = self.scaling[i].normalize(features[i]);
        }
        out
    }

    /// Raw network prediction for a six-feature vector (unclamped).
    pub fn predict_features(&self, features: &[f64; FEATURES]) -> Result<f64, ComfortError> {
        Ok(self.net.forward(&self.scaled(features))?[0])
    }

    fn design_matrix(&self, samples: &[&ComfortSample]) -> Array2<f64> {
        let mut x = Array2::zeros((samples.len(), FEATURES));
        for (mut row, s) in x.axis_iter_mut(Axis(0)).zip(samples) {
            let f = self.scaled(&s.features());
            for (dst, v) in row.iter_mut().zip(f) {
                *dst = v;
            }
        }
        x
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .scaling
            .iter()
            .map(|s| format!("{:.16e},{:.16e}", s.offset, s.scale))
            .collect();
        format!("scaling {}\n{}", parts.join(","), self.net.to_checkpoint_string())
    }

    pub fn from_text(text: &str) -> Result<Self, ComfortError> {
        let (first, rest) = text
            .split_once('\n')
            .ok_or_else(|| NetError::Checkpoint("missing scaling line".into()))?;
        let body = first
            .strip_prefix("scaling ")
            .ok_or_else(|| NetError::Checkpoint("first line must start with `scaling`".into()))?;
        let values = body
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| NetError::Checkpoint(format!("scaling: {e}")))?;
        if values.len() != 2 * FEATURES {
            return Err(NetError::Checkpoint(format!("scaling needs 12 values, got {}", values.len())).into());
        }
        let mut scaling = [RangeScaler { offset: 0.0, scale: 1.0 }; FEATURES];
        for (i, s) in scaling.iter_mut().enumerate() {
            *s = RangeScaler {
                offset: values[2 * i],
                scale: values[2 * i + 1],
            };
        }
        Self::new(DenseNet::from_checkpoint_str(rest)?, scaling)
    }

    pub fn save(&self, path: &Path) -> Result<(), ComfortError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ComfortError> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

fn feature_scaling(samples: &[&ComfortSample]) -> [RangeScaler; FEATURES] {
    let mut lo = [f64::INFINITY; FEATURES];
    let mut hi = [f64::NEG_INFINITY; FEATURES];
    for s in samples {
        for (i, v) in s.features().into_iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    let mut out = [RangeScaler { offset: 0.0, scale: 1.0 }; FEATURES];
    for i in 0..FEATURES {
        out[i] = RangeScaler::from_range(lo[i], hi[i]);
    }
    out
}

/// Regularized cost `alpha1 * sum (y - y')^2 + alpha2 * sum w^2` on a sample set.
pub fn regularized_cost(model: &ComfortModel, samples: &[ComfortSample], alpha1: f64, alpha2: f64) -> Result<f64, ComfortError> {
    let sse: f64 = samples
        .iter()
        .map(|s| model.predict_features(&s.features()).map(|p| (s.vote - p).powi(2)))
        .sum::<Result<f64, _>>()?;
    Ok(alpha1 * sse + alpha2 * model.net.weight_sq_norm())
}

/// Trains the comfort network on an 80/20 split of `samples`, minimizing the
/// regularized squared-error cost with minibatch Adam. The parameters from
/// the epoch with the lowest held-out MSE are returned.
pub fn train_comfort_model(
    samples: &[ComfortSample],
    cfg: &ComfortTrainConfig,
) -> Result<(ComfortModel, ComfortTrainReport), ComfortError> {
    if samples.len() < 10 {
        return Err(ComfortError::TooFewSamples(samples.len()));
    }
    if !(cfg.alpha1 >= 0.0 && cfg.alpha2 >= 0.0 && cfg.alpha1.is_finite() && cfg.alpha2.is_finite()) {
        return Err(ComfortError::InvalidParameter("alpha1 and alpha2 must be finite and non-negative".into()));
    }
    if cfg.batch_size == 0 || cfg.hidden.contains(&0) {
        return Err(ComfortError::InvalidParameter("batch size and hidden widths must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng);
    let n_train = samples.len() * 4 / 5;
    let (train_idx, test_idx) = order.split_at(n_train);
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(ComfortError::EmptySplit);
    }
    let train: Vec<&ComfortSample> = train_idx.iter().map(|&i| &samples[i]).collect();
    let test: Vec<ComfortSample> = test_idx.iter().map(|&i| samples[i]).collect();
    let train_owned: Vec<ComfortSample> = train.iter().map(|s| **s).collect();

    let net = DenseNet::init_uniform(
        &[FEATURES, cfg.hidden[0], cfg.hidden[1], 1],
        &[Activation::Sigmoid, Activation::Sigmoid, Activation::Linear],
        &mut rng,
    )?;
    let mut model = ComfortModel::new(net, feature_scaling(&train))?;
    let mut opt = OptimState::new(&model.net, cfg.learning_rate)?;

    let x_all = model.design_matrix(&train);
    let y_all: Vec<f64> = train.iter().map(|s| s.vote).collect();

    let mut report = ComfortTrainReport {
        train_indices: train_idx.to_vec(),
        test_indices: test_idx.to_vec(),
        ..Default::default()
    };
    let mut best = (evaluate_mse(&model, &test)?, model.net.clone());
    let mut batch_order: Vec<usize> = (0..train.len()).collect();
    let n = train.len() as f64;

    for epoch in 0..cfg.epochs {
        batch_order.shuffle(&mut rng);
        for chunk in batch_order.chunks(cfg.batch_size) {
            let x = x_all.select(Axis(0), chunk);
            let trace = model.net.forward_trace(x.view())?;
            let out = trace.output();
            let mut dy = Array2::zeros((chunk.len(), 1));
            for (r, &i) in chunk.iter().enumerate() {
                dy[[r, 0]] = 2.0 * cfg.alpha1 * (out[[r, 0]] - y_all[i]);
            }
            let (mut grad, _) = model.net.backward(&trace, dy.view())?;
            // The weight penalty is spread over the minibatches of one epoch.
            grad.add_weight_decay(&model.net, 2.0 * cfg.alpha2 * chunk.len() as f64 / n);
            adam_step(&mut model.net, &grad, &mut opt)?;
        }
        let cost = regularized_cost(&model, &train_owned, cfg.alpha1, cfg.alpha2)?;
        if !cost.is_finite() {
            return Err(ComfortError::NonFiniteCost(epoch));
        }
        let mse = evaluate_mse(&model, &test)?;
        report.cost.push(cost);
        report.test_mse.push(mse);
        report.weight_sq_norm.push(model.net.weight_sq_norm());
        if mse < best.0 {
            best = (mse, model.net.clone());
            report.best_epoch = epoch;
        }
    }
    model.net = best.1;
    Ok((model, report))
}

/// Predicted comfort vote for indoor conditions, clamped to `[-3, 3]`.
pub fn predict_comfort(
    model: &ComfortModel,
    indoor_temp: f64,
    indoor_humidity: f64,
    defaults: &ComfortDefaults,
) -> Result<f64, ComfortError> {
    let inputs = defaults.inputs(indoor_temp, indoor_humidity);
    inputs.validate()?;
    Ok(model.predict_features(&inputs.to_array())?.clamp(-VOTE_LIMIT, VOTE_LIMIT))
}

/// Mean squared error between votes and raw model predictions.
pub fn evaluate_mse(model: &ComfortModel, samples: &[ComfortSample]) -> Result<f64, ComfortError> {
    if samples.is_empty() {
        return Err(ComfortError::EmptySamples);
    }
    let refs: Vec<&ComfortSample> = samples.iter().collect();
    let pred = model.net.forward_batch(model.design_matrix(&refs).view())?;
    let sse: f64 = samples
        .iter()
        .zip(pred.column(0))
        .map(|(s, p)| (s.vote - p).powi(2))
        .sum();
    Ok(sse / samples.len() as f64)
}
