use std::path::Path;

use ndarray::Array2;
use rand::Rng;

use super::checkpoint::{read_manifest, write_manifest};
use super::replay::Transition;
use super::AgentError;
use crate::numerics::{adam_step, soft_update, Activation, DenseNet, OptimState};

#[derive(Debug, Clone, PartialEq)]
pub struct DqnConfig {
    pub hidden: Vec<usize>,
    pub gamma: f64,
    pub tau: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    pub min_replay: usize,
    pub epsilon_initial: f64,
    pub epsilon_final: f64,
    pub epsilon_episodes: usize,
}

impl Default for DqnConfig {
    fn default() -> Self {
        Self {
            hidden: vec![128, 128],
            gamma: 0.99,
            tau: 0.001,
            learning_rate: 1e-3,
            batch_size: 128,
            replay_capacity: 100_000,
            min_replay: 1000,
            epsilon_initial: 1.0,
            epsilon_final: 0.05,
            epsilon_episodes: 300,
        }
    }
}

impl DqnConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if self.hidden.contains(&0) || self.batch_size == 0 || self.replay_capacity == 0 {
            return Err(AgentError::InvalidConfig("sizes must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.gamma) || !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(AgentError::InvalidConfig(format!("gamma {} / tau {}", self.gamma, self.tau)));
        }
        if !(self.learning_rate > 0.0) {
            return Err(AgentError::InvalidConfig("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Q-network over a discrete action table, with a soft-updated target copy.
/// Stored transitions carry the action index as their single action entry.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    pub q: DenseNet,
    pub q_target: DenseNet,
    opt: OptimState,
    pub gamma: f64,
    pub tau: f64,
}

impl DqnAgent {
    pub fn new<R: Rng + ?Sized>(
        state_dim: usize,
        n_actions: usize,
        config: &DqnConfig,
        rng: &mut R,
    ) -> Result<Self, AgentError> {
        config.validate()?;
        let sizes: Vec<usize> = std::iter::once(state_dim)
            .chain(config.hidden.iter().copied())
            .chain(std::iter::once(n_actions))
            .collect();
        let mut acts = vec![Activation::Tanh; config.hidden.len()];
        acts.push(Activation::Linear);
        let q = DenseNet::init_uniform(&sizes, &acts, rng)?;
        Ok(Self {
            opt: OptimState::new(&q, config.learning_rate)?,
            q_target: q.clone(),
            q,
            gamma: config.gamma,
            tau: config.tau,
        })
    }

    pub fn n_actions(&self) -> usize {
        self.q.output_dim()
    }

    /// Highest-valued action index; ties go to the lowest index.
    pub fn greedy(&self, state: &[f64]) -> Result<usize, AgentError> {
        let q = self.q.forward(state)?;
        let mut best = 0;
        for (i, &v) in q.iter().enumerate() {
            if v > q[best] {
                best = i;
            }
        }
        Ok(best)
    }

    pub fn epsilon_greedy<R: Rng + ?Sized>(&self, state: &[f64], epsilon: f64, rng: &mut R) -> Result<usize, AgentError> {
        if rng.random::<f64>() < epsilon {
            Ok(rng.random_range(0..self.n_actions()))
        } else {
            self.greedy(state)
        }
    }

    /// One regression step of `Q(s, a)` toward `r + gamma * max_a' Q'(s', a')`.
    /// Returns the mean squared TD error before the step.
    pub fn update(&mut self, batch: &[&Transition]) -> Result<f64, AgentError> {
        if batch.is_empty() {
            return Err(AgentError::EmptyBatch);
        }
        let n = batch.len();
        let ds = self.q.input_dim();
        let mut states = Array2::zeros((n, ds));
        let mut next_states = Array2::zeros((n, ds));
        for (i, t) in batch.iter().enumerate() {
            states.row_mut(i).assign(&ndarray::ArrayView1::from(t.state.as_slice()));
            next_states.row_mut(i).assign(&ndarray::ArrayView1::from(t.next_state.as_slice()));
        }
        let bootstrap = if self.gamma > 0.0 {
            let q_next = self.q_target.forward_batch(next_states.view())?;
            q_next
                .rows()
                .into_iter()
                .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .collect()
        } else {
            vec![0.0; n]
        };
        let trace = self.q.forward_trace(states.view())?;
        let q = trace.output();
        let mut grad_out = Array2::zeros(q.dim());
        let mut loss = 0.0;
        for (i, t) in batch.iter().enumerate() {
            let a = t.action[0] as usize;
            if a >= self.n_actions() {
                return Err(AgentError::InvalidConfig(format!("action index {a} outside table")));
            }
            let y = if t.terminal { t.reward } else { t.reward + self.gamma * bootstrap[i] };
            let err = q[[i, a]] - y;
            loss += err * err;
            grad_out[[i, a]] = 2.0 * err / n as f64;
        }
        loss /= n as f64;
        if !loss.is_finite() {
            return Err(AgentError::NonFiniteLoss("dqn"));
        }
        let (grad, _) = self.q.backward(&trace, grad_out.view())?;
        adam_step(&mut self.q, &grad, &mut self.opt)?;
        soft_update(&mut self.q_target, &self.q, self.tau)?;
        Ok(loss)
    }

    pub fn save(&self, dir: &Path) -> Result<(), AgentError> {
        write_manifest(dir, "dqn", &[("q", &self.q), ("q_target", &self.q_target)])
    }

    pub fn load(dir: &Path, config: &DqnConfig) -> Result<Self, AgentError> {
        let mut nets = read_manifest(dir, "dqn", &["q", "q_target"])?;
        let q_target = nets.pop().unwrap();
        let q = nets.pop().unwrap();
        if !q.same_shape(&q_target) {
            return Err(AgentError::Checkpoint("dqn networks are not congruent".into()));
        }
        Ok(Self {
            opt: OptimState::new(&q, config.learning_rate)?,
            q,
            q_target,
            gamma: config.gamma,
            tau: config.tau,
        })
    }
}
