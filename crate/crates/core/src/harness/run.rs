use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Algo, ComfortSpec, ExperimentConfig, WeatherSpec};
use super::HarnessError;
use crate::agents::{
    build_action_table, evaluate_policy, manifest_kind, train_ddpg, train_dqn, train_tabular, write_metrics_csv,
    AgentError, DdpgAgent, DiscreteActionTable, DqnAgent, EpisodeMetrics, Policy, QTable, TabularAlgo, MANIFEST_FILE,
};
use crate::comfort::{generate_dataset, load_dataset, train_comfort_model, ComfortModel};
use crate::envsim::{
    load_weather_csv, write_trajectory_csv, HvacEnv, TrajectoryRow, WeatherSource, TRAJECTORY_HEADER,
};

pub const FAILURE_MARKER: &str = "FAILED";
const METRICS_FILE: &str = "metrics.csv";
const EVAL_METRICS_FILE: &str = "eval_metrics.csv";
const TRAJECTORY_FILE: &str = "trajectory.csv";
const SUMMARY_FILE: &str = "summary.json";
const CHECKPOINT_DIR: &str = "checkpoint";
const QTABLE_FILE: &str = "qtable.txt";

/// Headline numbers of one run. Training figures come from `metrics.csv`,
/// evaluation figures from `trajectory.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algo: String,
    pub seed: u64,
    pub threshold: f64,
    pub train_episodes: usize,
    /// Trailing-100 average reward at the last training episode.
    pub final_avg100_reward: Option<f64>,
    pub first10_mean_reward: Option<f64>,
    pub eval_slots: usize,
    pub mean_energy_kwh: f64,
    pub mean_abs_comfort: f64,
    /// Fraction of evaluation slots with `|M| <= D`.
    pub comfort_fraction: f64,
    pub mean_reward: f64,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub metrics_csv: PathBuf,
    pub eval_metrics_csv: PathBuf,
    pub trajectory_csv: PathBuf,
    pub checkpoint_dir: PathBuf,
    pub summary: RunSummary,
}

pub fn summarize(
    algo: &str,
    seed: u64,
    threshold: f64,
    train: &[EpisodeMetrics],
    trajectory: &[TrajectoryRow],
) -> RunSummary {
    let n = trajectory.len();
    let mean = |f: &dyn Fn(&TrajectoryRow) -> f64| {
        if n == 0 {
            0.0
        } else {
            trajectory.iter().map(f).sum::<f64>() / n as f64
        }
    };
    let first = &train[..train.len().min(10)];
    RunSummary {
        algo: algo.to_string(),
        seed,
        threshold,
        train_episodes: train.len(),
        final_avg100_reward: train.last().map(|m| m.avg100_reward),
        first10_mean_reward: (!first.is_empty()).then(|| first.iter().map(|m| m.reward).sum::<f64>() / first.len() as f64),
        eval_slots: n,
        mean_energy_kwh: mean(&|r| r.energy_kwh),
        mean_abs_comfort: mean(&|r| r.comfort.abs()),
        comfort_fraction: mean(&|r| if r.comfort.abs() <= threshold { 1.0 } else { 0.0 }),
        mean_reward: mean(&|r| r.reward),
    }
}

fn csv_error(path: &Path, reason: impl ToString) -> HarnessError {
    HarnessError::Csv {
        path: path.display().to_string(),
        reason: reason.to_string(),
    }
}

fn read_rows(path: &Path, header: &str) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let got = reader.headers().map_err(|e| csv_error(path, e))?.iter().collect::<Vec<_>>().join(",");
    if got != header {
        return Err(csv_error(path, format!("expected header `{header}`, found `{got}`")));
    }
    reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            rec.iter()
                .map(|f| f.parse::<f64>().map_err(|e| csv_error(path, format!("line {}: {e}", i + 2))))
                .collect()
        })
        .collect()
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<EpisodeMetrics>, HarnessError> {
    Ok(read_rows(path, crate::agents::METRICS_HEADER)?
        .into_iter()
        .map(|r| EpisodeMetrics {
            episode: r[0] as usize,
            reward: r[1],
            avg100_reward: r[2],
            mean_abs_comfort: r[3],
            energy_kwh: r[4],
            noise_scale: r[5],
        })
        .collect())
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectoryRow>, HarnessError> {
    Ok(read_rows(path, TRAJECTORY_HEADER)?
        .into_iter()
        .map(|r| TrajectoryRow {
            slot: r[0] as u64,
            indoor_temp: r[1],
            indoor_humidity: r[2],
            outdoor_temp: r[3],
            outdoor_humidity: r[4],
            temp_setpoint: r[5],
            humidity_setpoint: r[6],
            comfort: r[7],
            energy_kwh: r[8],
            reward: r[9],
        })
        .collect())
}

/// Recomputes a run summary from the CSVs in `dir`.
pub fn summary_from_dir(dir: &Path, algo: &str, seed: u64, threshold: f64) -> Result<RunSummary, HarnessError> {
    let train = read_metrics_csv(&dir.join(METRICS_FILE))?;
    let trajectory = read_trajectory_csv(&dir.join(TRAJECTORY_FILE))?;
    Ok(summarize(algo, seed, threshold, &train, &trajectory))
}

/// Loads the configured comfort model, or trains one from a CSV or synthetic data.
pub fn prepare_comfort(spec: &ComfortSpec) -> Result<ComfortModel, HarnessError> {
    if let Some(path) = &spec.model {
        return Ok(ComfortModel::load(path)?);
    }
    let samples = match &spec.data {
        Some(path) => load_dataset(path)?,
        None => generate_dataset(&spec.grid, spec.noise_sigma, spec.data_seed)?,
    };
    Ok(train_comfort_model(&samples, &spec.train)?.0)
}

pub fn build_env(cfg: &ExperimentConfig, seed: u64) -> Result<HvacEnv, HarnessError> {
    let weather = match &cfg.weather {
        WeatherSpec::Synthetic { params, seed: fixed } => {
            let mut p = params.clone();
            p.seed = fixed.unwrap_or(seed);
            WeatherSource::Synthetic(p)
        }
        WeatherSpec::Csv(path) => load_weather_csv(path)?,
    };
    Ok(HvacEnv::new(cfg.zone.clone(), weather, cfg.reward, cfg.comfort.defaults)?)
}

fn action_table(cfg: &ExperimentConfig) -> Result<DiscreteActionTable, HarnessError> {
    let (t, h) = cfg.action_ranges();
    Ok(build_action_table(t, h)?)
}

pub enum TrainedAgent {
    Ddpg(DdpgAgent),
    Dqn(DqnAgent),
    Tabular(TabularAlgo, QTable),
}

impl TrainedAgent {
    pub fn save(&self, dir: &Path) -> Result<(), HarnessError> {
        match self {
            TrainedAgent::Ddpg(a) => a.save(dir)?,
            TrainedAgent::Dqn(a) => a.save(dir)?,
            TrainedAgent::Tabular(algo, q) => {
                std::fs::create_dir_all(dir)?;
                q.save(&dir.join(QTABLE_FILE))?;
                std::fs::write(dir.join(MANIFEST_FILE), format!("agent {}\nqtable {QTABLE_FILE}\n", algo.name()))?;
            }
        }
        Ok(())
    }

    pub fn load(dir: &Path, cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let kind = manifest_kind(dir)?;
        Ok(match kind.as_str() {
            "ddpg" => TrainedAgent::Ddpg(DdpgAgent::load(dir, &cfg.ddpg)?),
            "dqn" => TrainedAgent::Dqn(DqnAgent::load(dir, &cfg.dqn)?),
            other => {
                let algo: TabularAlgo = other.parse()?;
                let path = dir.join(QTABLE_FILE);
                if !path.is_file() {
                    return Err(AgentError::Checkpoint(format!("missing q-table file {}", path.display())).into());
                }
                TrainedAgent::Tabular(algo, QTable::load(&path)?)
            }
        })
    }

    pub fn policy<'a>(&'a self, table: &'a DiscreteActionTable, cfg: &'a ExperimentConfig) -> Policy<'a> {
        match self {
            TrainedAgent::Ddpg(a) => Policy::Ddpg(a),
            TrainedAgent::Dqn(a) => Policy::Dqn(a, table),
            TrainedAgent::Tabular(_, q) => Policy::Tabular(q, table, &cfg.tabular),
        }
    }
}

fn train_agent(
    cfg: &ExperimentConfig,
    env: &mut HvacEnv,
    comfort: &ComfortModel,
    table: &DiscreteActionTable,
    seed: u64,
) -> Result<(TrainedAgent, Vec<EpisodeMetrics>), HarnessError> {
    Ok(match cfg.algo {
        Algo::Ddpg => {
            let (a, m) = train_ddpg(env, comfort, &cfg.ddpg, cfg.episodes, seed)?;
            (TrainedAgent::Ddpg(a), m)
        }
        Algo::Dqn => {
            let (a, m) = train_dqn(env, comfort, &cfg.dqn, table, cfg.episodes, seed)?;
            (TrainedAgent::Dqn(a), m)
        }
        Algo::QLearning | Algo::Sarsa => {
            let algo = cfg.algo.tabular().unwrap();
            let (q, m) = train_tabular(env, comfort, &cfg.tabular, algo, table, cfg.episodes, seed)?;
            (TrainedAgent::Tabular(algo, q), m)
        }
    })
}

fn write_summary(dir: &Path, summary: &RunSummary) -> Result<(), HarnessError> {
    std::fs::write(dir.join(SUMMARY_FILE), serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

fn evaluate_and_write(
    cfg: &ExperimentConfig,
    agent: &TrainedAgent,
    table: &DiscreteActionTable,
    env: &mut HvacEnv,
    comfort: &ComfortModel,
    seed: u64,
    dir: &Path,
) -> Result<(), HarnessError> {
    let eval = evaluate_policy(env, comfort, &agent.policy(table, cfg), cfg.eval_episodes, cfg.episodes, seed)?;
    write_metrics_csv(&dir.join(EVAL_METRICS_FILE), &eval.metrics)?;
    write_trajectory_csv(&dir.join(TRAJECTORY_FILE), &eval.trajectory)?;
    Ok(())
}

/// Trains one agent, evaluates its greedy policy and writes every artifact to `dir`.
/// On failure a `FAILED` marker holding the error is left in `dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    comfort: &ComfortModel,
    seed: u64,
    dir: &Path,
) -> Result<RunArtifacts, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let _ = std::fs::remove_file(dir.join(FAILURE_MARKER));
    let result = run_inner(cfg, comfort, seed, dir);
    if let Err(e) = &result {
        std::fs::write(dir.join(FAILURE_MARKER), format!("{}: {e}\n", e.kind()))?;
    }
    result
}

fn run_inner(cfg: &ExperimentConfig, comfort: &ComfortModel, seed: u64, dir: &Path) -> Result<RunArtifacts, HarnessError> {
    cfg.validate()?;
    let table = action_table(cfg)?;
    let mut env = build_env(cfg, seed)?;
    let (agent, metrics) = train_agent(cfg, &mut env, comfort, &table, seed)?;
    write_metrics_csv(&dir.join(METRICS_FILE), &metrics)?;
    agent.save(&dir.join(CHECKPOINT_DIR))?;
    evaluate_and_write(cfg, &agent, &table, &mut env, comfort, seed, dir)?;
    let summary = summary_from_dir(dir, cfg.algo.name(), seed, cfg.reward.threshold)?;
    write_summary(dir, &summary)?;
    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        metrics_csv: dir.join(METRICS_FILE),
        eval_metrics_csv: dir.join(EVAL_METRICS_FILE),
        trajectory_csv: dir.join(TRAJECTORY_FILE),
        checkpoint_dir: dir.join(CHECKPOINT_DIR),
        summary,
    })
}

/// Evaluates a saved checkpoint and writes evaluation artifacts to `dir`.
pub fn evaluate_checkpoint(
    cfg: &ExperimentConfig,
    comfort: &ComfortModel,
    checkpoint: &Path,
    seed: u64,
    dir: &Path,
) -> Result<RunSummary, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let table = action_table(cfg)?;
    let agent = TrainedAgent::load(checkpoint, cfg)?;
    let mut env = build_env(cfg, seed)?;
    evaluate_and_write(cfg, &agent, &table, &mut env, comfort, seed, dir)?;
    let trajectory = read_trajectory_csv(&dir.join(TRAJECTORY_FILE))?;
    let kind = manifest_kind(checkpoint)?;
    let summary = summarize(&kind, seed, cfg.reward.threshold, &[], &trajectory);
    write_summary(dir, &summary)?;
    Ok(summary)
}
