use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::action_table::DiscreteActionTable;
use super::ddpg::{DdpgAgent, DdpgConfig};
use super::dqn::{DqnAgent, DqnConfig};
use super::noise::{LinearSchedule, OuNoise};
use super::replay::{ReplayBuffer, Transition};
use super::tabular::{tabular_target, QTable, TabularAlgo, TabularConfig};
use super::AgentError;
use crate::envsim::{
    ComfortEstimator, ControlAction, HvacEnv, StepOutcome, ThermalState, TrajectoryRow, HUMIDITY_SETPOINT_RANGE,
    TEMP_SETPOINT_RANGE,
};
use crate::numerics::RangeScaler;

pub const METRICS_HEADER: &str = "episode,reward,avg100_reward,mean_abs_comfort,energy_kwh,noise_scale";
pub const TRAILING_WINDOW: usize = 100;

const STATE_TEMP: (f64, f64) = (10.0, 40.0);
const STATE_HUMIDITY: (f64, f64) = (0.0, 100.0);

const STREAM_INIT: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_REPLAY: u64 = 3;
const STREAM_RESET: u64 = 4;
const STREAM_EXPLORE: u64 = 5;
const STREAM_EVAL: u64 = 6;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for `(stream, index)` under a base run seed.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(base) ^ stream) ^ index)
}

/// Maps the physical state onto roughly `[-1, 1]` per component.
pub fn encode_state(s: &ThermalState) -> Vec<f64> {
    let t = RangeScaler::from_range(STATE_TEMP.0, STATE_TEMP.1);
    let h = RangeScaler::from_range(STATE_HUMIDITY.0, STATE_HUMIDITY.1);
    vec![
        t.normalize(s.indoor_temp),
        h.normalize(s.indoor_humidity),
        t.normalize(s.outdoor_temp),
        h.normalize(s.outdoor_humidity),
    ]
}

/// Maps a normalized action in `[-1, 1]^2` onto set-points, clipping to bounds.
pub fn decode_action(y: &[f64]) -> ControlAction {
    let t = RangeScaler::from_range(TEMP_SETPOINT_RANGE.0, TEMP_SETPOINT_RANGE.1);
    let h = RangeScaler::from_range(HUMIDITY_SETPOINT_RANGE.0, HUMIDITY_SETPOINT_RANGE.1);
    ControlAction::clipped(t.denormalize(y[0]), h.denormalize(y[1]))
}

pub fn encode_action(a: &ControlAction) -> Vec<f64> {
    let t = RangeScaler::from_range(TEMP_SETPOINT_RANGE.0, TEMP_SETPOINT_RANGE.1);
    let h = RangeScaler::from_range(HUMIDITY_SETPOINT_RANGE.0, HUMIDITY_SETPOINT_RANGE.1);
    vec![t.normalize(a.temp_setpoint()), h.normalize(a.humidity_setpoint())]
}

/// Discrete key for tabular agents: every component floored to its bin.
pub fn state_key(s: &ThermalState, cfg: &TabularConfig) -> Vec<i64> {
    vec![
        (s.indoor_temp / cfg.temp_bin).floor() as i64,
        (s.indoor_humidity / cfg.humidity_bin).floor() as i64,
        (s.outdoor_temp / cfg.temp_bin).floor() as i64,
        (s.outdoor_humidity / cfg.humidity_bin).floor() as i64,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeMetrics {
    pub episode: usize,
    pub reward: f64,
    pub avg100_reward: f64,
    pub mean_abs_comfort: f64,
    pub energy_kwh: f64,
    /// Exploration level in force: OU scale for DDPG, epsilon for the baselines.
    pub noise_scale: f64,
}

/// Mean of the last `window` values up to and including each position.
pub fn trailing_average(values: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        sum += v;
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

pub fn write_metrics_csv(path: &Path, metrics: &[EpisodeMetrics]) -> Result<(), AgentError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{METRICS_HEADER}")?;
    for m in metrics {
        writeln!(
            f,
            "{},{},{},{},{},{}",
            m.episode, m.reward, m.avg100_reward, m.mean_abs_comfort, m.energy_kwh, m.noise_scale
        )?;
    }
    f.flush()?;
    Ok(())
}

#[derive(Default)]
struct EpisodeTally {
    reward: f64,
    abs_comfort: f64,
    energy: f64,
    steps: usize,
}

impl EpisodeTally {
    fn add(&mut self, out: &StepOutcome) {
        self.reward += out.reward;
        self.abs_comfort += out.comfort.abs();
        self.energy += out.energy_kwh;
        self.steps += 1;
    }
}

struct MetricsLog {
    metrics: Vec<EpisodeMetrics>,
    rewards: Vec<f64>,
}

impl MetricsLog {
    fn new() -> Self {
        Self {
            metrics: Vec::new(),
            rewards: Vec::new(),
        }
    }

    fn push(&mut self, tally: &EpisodeTally, noise_scale: f64) {
        let episode = self.metrics.len();
        self.rewards.push(tally.reward);
        let start = self.rewards.len().saturating_sub(TRAILING_WINDOW);
        let window = &self.rewards[start..];
        self.metrics.push(EpisodeMetrics {
            episode,
            reward: tally.reward,
            avg100_reward: window.iter().sum::<f64>() / window.len() as f64,
            mean_abs_comfort: tally.abs_comfort / tally.steps.max(1) as f64,
            energy_kwh: tally.energy,
            noise_scale,
        });
    }
}

fn reset_for_episode(env: &mut HvacEnv, seed: u64, episode: usize) -> Result<ThermalState, AgentError> {
    Ok(env.reset_episode(derive_seed(seed, STREAM_RESET, episode as u64), episode as u64)?)
}

fn sample_batch(replay: &mut ReplayBuffer<Transition>, n: usize) -> Result<Vec<&Transition>, AgentError> {
    let idx = replay.sample_indices(n)?;
    let replay = &*replay;
    Ok(idx.into_iter().map(|i| replay.get(i)).collect())
}

/// Trains a DDPG agent for `episodes` episodes and logs one metrics row per episode.
pub fn train_ddpg<C: ComfortEstimator + ?Sized>(
    env: &mut HvacEnv,
    comfort: &C,
    cfg: &DdpgConfig,
    episodes: usize,
    seed: u64,
) -> Result<(DdpgAgent, Vec<EpisodeMetrics>), AgentError> {
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_INIT, 0));
    let mut agent = DdpgAgent::new(4, 2, cfg, &mut init_rng)?;
    let mut noise = OuNoise::new(2, cfg.ou_theta, cfg.ou_sigma, 0.0, derive_seed(seed, STREAM_NOISE, 0))?;
    let mut replay = ReplayBuffer::new(cfg.replay_capacity, derive_seed(seed, STREAM_REPLAY, 0))?;
    let schedule = LinearSchedule {
        initial: cfg.noise_initial,
        last: cfg.noise_final,
        episodes: cfg.noise_episodes,
    };
    let warmup = cfg.min_replay.max(1);
    let mut log = MetricsLog::new();
    for ep in 0..episodes {
        let mut state = reset_for_episode(env, seed, ep)?;
        noise.reset();
        noise.set_scale(schedule.value(ep));
        let mut tally = EpisodeTally::default();
        while !env.is_done() {
            let x = encode_state(&state);
            let y = agent.act(&x, &mut noise, true)?;
            let out = env.step(&decode_action(&y), comfort)?;
            tally.add(&out);
            let t = Transition {
                state: x,
                action: y,
                reward: out.reward,
                next_state: encode_state(&out.state),
                terminal: false,
            };
            if !t.is_finite() {
                return Err(AgentError::NonFiniteLoss("transition"));
            }
            replay.push(t);
            if replay.len() >= warmup {
                let batch = sample_batch(&mut replay, cfg.batch_size)?;
                agent.update(&batch)?;
            }
            state = out.state;
        }
        log.push(&tally, noise.scale());
    }
    Ok((agent, log.metrics))
}

/// Trains tabular Q-learning or SARSA over `table`.
pub fn train_tabular<C: ComfortEstimator + ?Sized>(
    env: &mut HvacEnv,
    comfort: &C,
    cfg: &TabularConfig,
    algo: TabularAlgo,
    table: &DiscreteActionTable,
    episodes: usize,
    seed: u64,
) -> Result<(QTable, Vec<EpisodeMetrics>), AgentError> {
    cfg.validate()?;
    let mut q = QTable::with_initial(table.len(), cfg.initial_q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_EXPLORE, 0));
    let schedule = LinearSchedule {
        initial: cfg.epsilon_initial,
        last: cfg.epsilon_final,
        episodes: cfg.epsilon_episodes,
    };
    let mut log = MetricsLog::new();
    for ep in 0..episodes {
        let eps = schedule.value(ep);
        let mut state = reset_for_episode(env, seed, ep)?;
        let mut key = state_key(&state, cfg);
        let mut action = q.epsilon_greedy(&key, eps, &mut rng);
        let mut tally = EpisodeTally::default();
        while !env.is_done() {
            let out = env.step(&table.action(action), comfort)?;
            tally.add(&out);
            let next_key = state_key(&out.state, cfg);
            let next_action = q.epsilon_greedy(&next_key, eps, &mut rng);
            let target = tabular_target(&q, algo, out.reward, &next_key, next_action, cfg.gamma, false);
            q.update(&key, action, target, cfg.alpha)?;
            // Q-learning re-selects after the update so the fresh estimate is used.
            action = match algo {
                TabularAlgo::Sarsa => next_action,
                TabularAlgo::QLearning => q.epsilon_greedy(&next_key, eps, &mut rng),
            };
            state = out.state;
            key = next_key;
        }
        let _ = state;
        log.push(&tally, eps);
    }
    Ok((q, log.metrics))
}

/// Trains a DQN over `table`.
pub fn train_dqn<C: ComfortEstimator + ?Sized>(
    env: &mut HvacEnv,
    comfort: &C,
    cfg: &DqnConfig,
    table: &DiscreteActionTable,
    episodes: usize,
    seed: u64,
) -> Result<(DqnAgent, Vec<EpisodeMetrics>), AgentError> {
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_INIT, 0));
    let mut agent = DqnAgent::new(4, table.len(), cfg, &mut init_rng)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_EXPLORE, 0));
    let mut replay = ReplayBuffer::new(cfg.replay_capacity, derive_seed(seed, STREAM_REPLAY, 0))?;
    let schedule = LinearSchedule {
        initial: cfg.epsilon_initial,
        last: cfg.epsilon_final,
        episodes: cfg.epsilon_episodes,
    };
    let warmup = cfg.min_replay.max(1);
    let mut log = MetricsLog::new();
    for ep in 0..episodes {
        let eps = schedule.value(ep);
        let mut state = reset_for_episode(env, seed, ep)?;
        let mut tally = EpisodeTally::default();
        while !env.is_done() {
            let x = encode_state(&state);
            let a = agent.epsilon_greedy(&x, eps, &mut rng)?;
            let out = env.step(&table.action(a), comfort)?;
            tally.add(&out);
            replay.push(Transition {
                state: x,
                action: vec![a as f64],
                reward: out.reward,
                next_state: encode_state(&out.state),
                terminal: false,
            });
            if replay.len() >= warmup {
                let batch = sample_batch(&mut replay, cfg.batch_size)?;
                agent.update(&batch)?;
            }
            state = out.state;
        }
        log.push(&tally, eps);
    }
    Ok((agent, log.metrics))
}

/// Greedy controller extracted from a trained agent.
pub enum Policy<'a> {
    Ddpg(&'a DdpgAgent),
    Dqn(&'a DqnAgent, &'a DiscreteActionTable),
    Tabular(&'a QTable, &'a DiscreteActionTable, &'a TabularConfig),
}

impl Policy<'_> {
    pub fn action(&self, s: &ThermalState) -> Result<ControlAction, AgentError> {
        Ok(match self {
            Policy::Ddpg(a) => decode_action(&a.greedy(&encode_state(s))?),
            Policy::Dqn(a, table) => table.action(a.greedy(&encode_state(s))?),
            Policy::Tabular(q, table, cfg) => table.action(q.greedy(&state_key(s, cfg))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub metrics: Vec<EpisodeMetrics>,
    pub trajectory: Vec<TrajectoryRow>,
}

/// Runs the greedy policy for `episodes` episodes starting at episode index
/// `first_episode`, without learning.
pub fn evaluate_policy<C: ComfortEstimator + ?Sized>(
    env: &mut HvacEnv,
    comfort: &C,
    policy: &Policy<'_>,
    episodes: usize,
    first_episode: usize,
    seed: u64,
) -> Result<Evaluation, AgentError> {
    let mut log = MetricsLog::new();
    let mut trajectory = Vec::with_capacity(episodes * env.episode_len());
    for k in 0..episodes {
        let ep = first_episode + k;
        let mut state = env.reset_episode(derive_seed(seed, STREAM_EVAL, ep as u64), ep as u64)?;
        let mut tally = EpisodeTally::default();
        while !env.is_done() {
            let action = policy.action(&state)?;
            let out = env.step(&action, comfort)?;
            tally.add(&out);
            trajectory.push(TrajectoryRow::new(state.slot, &action, &out));
            state = out.state;
        }
        log.push(&tally, 0.0);
    }
    Ok(Evaluation {
        metrics: log.metrics,
        trajectory,
    })
}
