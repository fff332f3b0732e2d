use std::path::Path;

use ndarray::{s, Array2, Axis};
use rand::Rng;

use super::checkpoint::{read_manifest, write_manifest};
use super::noise::OuNoise;
use super::replay::Transition;
use super::AgentError;
use crate::numerics::{adam_step, soft_update, Activation, DenseNet, OptimState};

#[derive(Debug, Clone, PartialEq)]
pub struct DdpgConfig {
    pub hidden: Vec<usize>,
    pub gamma: f64,
    pub tau: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    /// Transitions stored before the first update.
    pub min_replay: usize,
    pub ou_theta: f64,
    pub ou_sigma: f64,
    pub noise_initial: f64,
    pub noise_final: f64,
    pub noise_episodes: usize,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        Self {
            hidden: vec![128, 128],
            gamma: 0.99,
            tau: 0.001,
            actor_lr: 1e-3,
            critic_lr: 1e-3,
            batch_size: 128,
            replay_capacity: 100_000,
            min_replay: 1000,
            ou_theta: 0.15,
            ou_sigma: 0.2,
            noise_initial: 0.7,
            noise_final: 0.1,
            noise_episodes: 300,
        }
    }
}

impl DdpgConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: String| Err(AgentError::InvalidConfig(m));
        if self.hidden.contains(&0) {
            return bad("hidden sizes must be positive".into());
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma {} outside [0, 1)", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad(format!("tau {} outside (0, 1]", self.tau));
        }
        if !(self.actor_lr > 0.0) || !(self.critic_lr > 0.0) {
            return bad("learning rates must be positive".into());
        }
        if self.batch_size == 0 || self.replay_capacity == 0 {
            return bad("batch size and replay capacity must be positive".into());
        }
        if !(self.noise_initial >= 0.0 && self.noise_final >= 0.0) {
            return bad("noise scales must be non-negative".into());
        }
        Ok(())
    }
}

/// Actor-critic pair with target copies, working on normalized vectors:
/// states as given, actions in `[-1, 1]` per dimension.
#[derive(Debug, Clone)]
pub struct DdpgAgent {
    pub actor: DenseNet,
    pub critic: DenseNet,
    pub actor_target: DenseNet,
    pub critic_target: DenseNet,
    actor_opt: OptimState,
    critic_opt: OptimState,
    pub gamma: f64,
    pub tau: f64,
}

fn layer_sizes(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    std::iter::once(input).chain(hidden.iter().copied()).chain(std::iter::once(output)).collect()
}

fn activations(hidden: usize, out: Activation) -> Vec<Activation> {
    let mut acts = vec![Activation::Tanh; hidden];
    acts.push(out);
    acts
}

fn rows(vectors: &[&[f64]], dim: usize) -> Array2<f64> {
    let mut m = Array2::zeros((vectors.len(), dim));
    for (mut row, v) in m.rows_mut().into_iter().zip(vectors) {
        row.assign(&ndarray::ArrayView1::from(*v));
    }
    m
}

fn concat(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    ndarray::concatenate(Axis(1), &[a.view(), b.view()]).expect("row counts match")
}

impl DdpgAgent {
    pub fn new<R: Rng + ?Sized>(
        state_dim: usize,
        action_dim: usize,
        config: &DdpgConfig,
        rng: &mut R,
    ) -> Result<Self, AgentError> {
        config.validate()?;
        let h = config.hidden.len();
        let actor = DenseNet::init_uniform(
            &layer_sizes(state_dim, &config.hidden, action_dim),
            &activations(h, Activation::Tanh),
            rng,
        )?;
        let critic = DenseNet::init_uniform(
            &layer_sizes(state_dim + action_dim, &config.hidden, 1),
            &activations(h, Activation::Linear),
            rng,
        )?;
        Ok(Self {
            actor_opt: OptimState::new(&actor, config.actor_lr)?,
            critic_opt: OptimState::new(&critic, config.critic_lr)?,
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor,
            critic,
            gamma: config.gamma,
            tau: config.tau,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.actor.input_dim()
    }

    pub fn action_dim(&self) -> usize {
        self.actor.output_dim()
    }

    /// Deterministic policy output.
    pub fn greedy(&self, state: &[f64]) -> Result<Vec<f64>, AgentError> {
        Ok(self.actor.forward(state)?)
    }

    /// Policy output plus exploration noise when `explore`, clipped to `[-1, 1]`.
    pub fn act(&self, state: &[f64], noise: &mut OuNoise, explore: bool) -> Result<Vec<f64>, AgentError> {
        let mut a = self.greedy(state)?;
        if explore {
            for (x, n) in a.iter_mut().zip(noise.sample(1.0)) {
                *x += n;
            }
        }
        Ok(a.into_iter().map(|x| if x.is_nan() { 0.0 } else { x.clamp(-1.0, 1.0) }).collect())
    }

    pub fn q_value(&self, state: &[f64], action: &[f64]) -> Result<f64, AgentError> {
        let input: Vec<f64> = state.iter().chain(action).copied().collect();
        Ok(self.critic.forward(&input)?[0])
    }

    /// Bootstrapped target `r + gamma * Q'(s', mu'(s'))`, or `r` for terminal steps.
    pub fn td_target(&self, t: &Transition) -> Result<f64, AgentError> {
        if t.terminal || self.gamma == 0.0 {
            return Ok(t.reward);
        }
        let next_action = self.actor_target.forward(&t.next_state)?;
        let input: Vec<f64> = t.next_state.iter().chain(&next_action).copied().collect();
        let q = self.critic_target.forward(&input)?[0];
        Ok(t.reward + self.gamma * q)
    }

    fn batch_targets(&self, batch: &[&Transition], next_states: &Array2<f64>) -> Result<Vec<f64>, AgentError> {
        if self.gamma == 0.0 {
            return Ok(batch.iter().map(|t| t.reward).collect());
        }
        let next_actions = self.actor_target.forward_batch(next_states.view())?;
        let q = self.critic_target.forward_batch(concat(next_states, &next_actions).view())?;
        Ok(batch
            .iter()
            .zip(q.column(0))
            .map(|(t, &qv)| if t.terminal { t.reward } else { t.reward + self.gamma * qv })
            .collect())
    }

    /// One critic step, one actor step, then soft target updates.
    /// Returns the critic loss and the mean of `Q(s, mu(s))` before the actor step.
    pub fn update(&mut self, batch: &[&Transition]) -> Result<(f64, f64), AgentError> {
        if batch.is_empty() {
            return Err(AgentError::EmptyBatch);
        }
        let n = batch.len() as f64;
        let (ds, da) = (self.state_dim(), self.action_dim());
        let states = rows(&batch.iter().map(|t| t.state.as_slice()).collect::<Vec<_>>(), ds);
        let actions = rows(&batch.iter().map(|t| t.action.as_slice()).collect::<Vec<_>>(), da);
        let next_states = rows(&batch.iter().map(|t| t.next_state.as_slice()).collect::<Vec<_>>(), ds);
        let targets = self.batch_targets(batch, &next_states)?;

        let trace = self.critic.forward_trace(concat(&states, &actions).view())?;
        let q = trace.output().column(0).to_owned();
        let mut dq = Array2::zeros((batch.len(), 1));
        let mut critic_loss = 0.0;
        for (i, (&qi, &yi)) in q.iter().zip(&targets).enumerate() {
            let err = qi - yi;
            critic_loss += err * err;
            dq[[i, 0]] = 2.0 * err / n;
        }
        critic_loss /= n;
        if !critic_loss.is_finite() {
            return Err(AgentError::NonFiniteLoss("critic"));
        }
        let (critic_grad, _) = self.critic.backward(&trace, dq.view())?;
        adam_step(&mut self.critic, &critic_grad, &mut self.critic_opt)?;

        let actor_trace = self.actor.forward_trace(states.view())?;
        let policy_actions = actor_trace.output().clone();
        let q_trace = self.critic.forward_trace(concat(&states, &policy_actions).view())?;
        let objective = q_trace.output().column(0).sum() / n;
        if !objective.is_finite() {
            return Err(AgentError::NonFiniteLoss("actor"));
        }
        // Ascend the mean Q: minimise -mean Q.
        let neg = Array2::from_elem((batch.len(), 1), -1.0 / n);
        let (_, input_grad) = self.critic.backward(&q_trace, neg.view())?;
        let action_grad = input_grad.slice(s![.., ds..]).to_owned();
        let (actor_grad, _) = self.actor.backward(&actor_trace, action_grad.view())?;
        adam_step(&mut self.actor, &actor_grad, &mut self.actor_opt)?;

        soft_update(&mut self.critic_target, &self.critic, self.tau)?;
        soft_update(&mut self.actor_target, &self.actor, self.tau)?;
        Ok((critic_loss, objective))
    }

    pub fn save(&self, dir: &Path) -> Result<(), AgentError> {
        write_manifest(
            dir,
            "ddpg",
            &[
                ("actor", &self.actor),
                ("critic", &self.critic),
                ("actor_target", &self.actor_target),
                ("critic_target", &self.critic_target),
            ],
        )
    }

    /// Restores networks from a checkpoint; optimizer moments start fresh.
    pub fn load(dir: &Path, config: &DdpgConfig) -> Result<Self, AgentError> {
        let mut nets = read_manifest(dir, "ddpg", &["actor", "critic", "actor_target", "critic_target"])?;
        let critic_target = nets.pop().unwrap();
        let actor_target = nets.pop().unwrap();
        let critic = nets.pop().unwrap();
        let actor = nets.pop().unwrap();
        if !actor.same_shape(&actor_target)
            || !critic.same_shape(&critic_target)
            || critic.input_dim() != actor.input_dim() + actor.output_dim()
        {
            return Err(AgentError::Checkpoint("ddpg networks are not congruent".into()));
        }
        Ok(Self {
            actor_opt: OptimState::new(&actor, config.actor_lr)?,
            critic_opt: OptimState::new(&critic, config.critic_lr)?,
            actor,
            critic,
            actor_target,
            critic_target,
            gamma: config.gamma,
            tau: config.tau,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::replay::ReplayBuffer;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn agent(cfg: &DdpgConfig) -> DdpgAgent {
        DdpgAgent::new(4, 2, cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
    }

    fn transition(rng: &mut ChaCha8Rng, terminal: bool) -> Transition {
        let mut v = |n: usize| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
        Transition {
            state: v(4),
            action: v(2),
            reward: v(1)[0],
            next_state: v(4),
            terminal,
        }
    }

    #[test]
    fn td_target_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = transition(&mut rng, false);
        let a0 = agent(&DdpgConfig { gamma: 0.0, ..Default::default() });
        assert_eq!(a0.td_target(&t).unwrap(), t.reward);
        let a = agent(&DdpgConfig::default());
        let term = Transition { terminal: true, ..t.clone() };
        assert_eq!(a.td_target(&term).unwrap(), t.reward);
    }

    #[test]
    fn td_target_arithmetic() {
        // Zero critic weights with output bias 10 make Q' == 10 everywhere.
        let mut a = agent(&DdpgConfig::default());
        for k in 0..a.critic_target.num_layers() {
            a.critic_target.weight_mut(k).fill(0.0);
        }
        let last = a.critic_target.num_layers() - 1;
        a.critic_target.bias_mut(last).fill(10.0);
        let t = Transition {
            reward: 1.0,
            ..transition(&mut ChaCha8Rng::seed_from_u64(3), false)
        };
        assert!((a.td_target(&t).unwrap() - 10.9).abs() < 1e-12);
    }

    #[test]
    fn batch_and_single_targets_agree() {
        let a = agent(&DdpgConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ts: Vec<Transition> = (0..9).map(|i| transition(&mut rng, i % 3 == 0)).collect();
        let refs: Vec<&Transition> = ts.iter().collect();
        let next = rows(&refs.iter().map(|t| t.next_state.as_slice()).collect::<Vec<_>>(), 4);
        let batch = a.batch_targets(&refs, &next).unwrap();
        for (t, b) in ts.iter().zip(batch) {
            assert!((a.td_target(t).unwrap() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn actions_stay_in_bounds() {
        let a = agent(&DdpgConfig::default());
        let mut noise = OuNoise::new(2, 0.15, 5.0, 0.0, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let s: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            for x in a.act(&s, &mut noise, true).unwrap() {
                assert!((-1.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn greedy_is_pure_and_zero_noise_is_greedy() {
        let a = agent(&DdpgConfig::default());
        let s = [0.1, -0.2, 0.3, 0.0];
        let mut noise = OuNoise::new(2, 0.15, 0.2, 0.0, 9).unwrap();
        assert_eq!(a.act(&s, &mut noise, false).unwrap(), a.act(&s, &mut noise, false).unwrap());
        noise.set_scale(0.0);
        let g: Vec<f64> = a.greedy(&s).unwrap().into_iter().map(|x| x.clamp(-1.0, 1.0)).collect();
        assert_eq!(a.act(&s, &mut noise, true).unwrap(), g);
    }

    #[test]
    fn soft_update_is_exact_after_update() {
        let mut a = agent(&DdpgConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ts: Vec<Transition> = (0..32).map(|_| transition(&mut rng, false)).collect();
        let refs: Vec<&Transition> = ts.iter().collect();
        for _ in 0..3 {
            let prev_actor: Vec<f64> = a.actor_target.params().collect();
            let prev_critic: Vec<f64> = a.critic_target.params().collect();
            a.update(&refs).unwrap();
            for (net, target, prev) in [(&a.actor, &a.actor_target, &prev_actor), (&a.critic, &a.critic_target, &prev_critic)] {
                for ((s, t), p) in net.params().zip(target.params()).zip(prev) {
                    assert_eq!(t, 0.001 * s + (1.0 - 0.001) * p);
                }
            }
        }
    }

    #[test]
    fn perfect_critic_is_not_moved() {
        let mut a = agent(&DdpgConfig { gamma: 0.0, ..Default::default() });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ts: Vec<Transition> = (0..16).map(|_| transition(&mut rng, false)).collect();
        let refs: Vec<&Transition> = ts.iter().collect();
        let s = rows(&refs.iter().map(|t| t.state.as_slice()).collect::<Vec<_>>(), 4);
        let act = rows(&refs.iter().map(|t| t.action.as_slice()).collect::<Vec<_>>(), 2);
        let q = a.critic.forward_batch(concat(&s, &act).view()).unwrap();
        for (t, &qv) in ts.iter_mut().zip(q.column(0)) {
            t.reward = qv;
        }
        let refs: Vec<&Transition> = ts.iter().collect();
        let before = a.critic.clone();
        let (loss, _) = a.update(&refs).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(a.critic, before);
    }

    #[test]
    fn tau_zero_keeps_targets() {
        let mut a = agent(&DdpgConfig::default());
        a.tau = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ts: Vec<Transition> = (0..8).map(|_| transition(&mut rng, false)).collect();
        let refs: Vec<&Transition> = ts.iter().collect();
        let (at, ct) = (a.actor_target.clone(), a.critic_target.clone());
        a.update(&refs).unwrap();
        assert_eq!(a.actor_target, at);
        assert_eq!(a.critic_target, ct);
        assert_ne!(a.actor, at);
    }

    #[test]
    fn empty_batch_rejected() {
        let mut a = agent(&DdpgConfig::default());
        assert!(matches!(a.update(&[]), Err(AgentError::EmptyBatch)));
    }

    #[test]
    fn bandit_converges_to_optimum() {
        let cfg = DdpgConfig {
            gamma: 0.0,
            actor_lr: 1e-3,
            batch_size: 64,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a = DdpgAgent::new(1, 1, &cfg, &mut rng).unwrap();
        let mut noise = OuNoise::new(1, 0.15, 0.2, 0.0, 12).unwrap();
        noise.set_scale(1.5);
        let mut replay = ReplayBuffer::new(10_000, 13).unwrap();
        let s = vec![0.0];
        for _ in 0..2000 {
            let act = a.act(&s, &mut noise, true).unwrap();
            let reward = -(act[0] - 0.3).powi(2);
            replay.push(Transition {
                state: s.clone(),
                action: act,
                reward,
                next_state: s.clone(),
                terminal: true,
            });
            let idx = replay.sample_indices(cfg.batch_size).unwrap();
            let batch: Vec<&Transition> = idx.iter().map(|&i| replay.get(i)).collect();
            a.update(&batch).unwrap();
        }
        let learned = a.greedy(&s).unwrap()[0];
        assert!((learned - 0.3).abs() < 0.05, "{learned}");
    }

    #[test]
    fn checkpoint_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let a = agent(&DdpgConfig::default());
        a.save(dir.path()).unwrap();
        let b = DdpgAgent::load(dir.path(), &DdpgConfig::default()).unwrap();
        assert_eq!(a.actor, b.actor);
        assert_eq!(a.critic_target, b.critic_target);
    }
}
