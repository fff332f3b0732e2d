use std::fmt::Write as _;
use std::path::Path;

use super::config::{Algo, ExperimentConfig, SweepParam};
use super::run::{read_metrics_csv, run_experiment, RunSummary};
use super::HarnessError;
use crate::comfort::ComfortModel;

pub const SWEEP_HEADER: &str =
    "param,value,runs_ok,mean_energy_kwh,mean_abs_comfort,comfort_fraction,final_avg100_reward,failed_seeds";
pub const COMPARE_HEADER: &str =
    "index,algo,seed,final_avg100_reward,mean_energy_kwh,mean_abs_comfort,comfort_fraction,mean_reward";
pub const CURVES_HEADER: &str = "index,algo,seed,episode,avg100_reward";

/// One sweep value aggregated over the seeds whose runs succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub runs: Vec<RunSummary>,
    pub failed_seeds: Vec<u64>,
}

fn seed_mean(runs: &[RunSummary], f: impl Fn(&RunSummary) -> f64) -> f64 {
    if runs.is_empty() {
        f64::NAN
    } else {
        runs.iter().map(f).sum::<f64>() / runs.len() as f64
    }
}

impl SweepRow {
    pub fn mean_energy_kwh(&self) -> f64 {
        seed_mean(&self.runs, |r| r.mean_energy_kwh)
    }

    pub fn mean_abs_comfort(&self) -> f64 {
        seed_mean(&self.runs, |r| r.mean_abs_comfort)
    }

    pub fn comfort_fraction(&self) -> f64 {
        seed_mean(&self.runs, |r| r.comfort_fraction)
    }

    pub fn final_avg100_reward(&self) -> f64 {
        seed_mean(&self.runs, |r| r.final_avg100_reward.unwrap_or(f64::NAN))
    }
}

fn with_param(cfg: &ExperimentConfig, param: SweepParam, value: f64) -> ExperimentConfig {
    let mut c = cfg.clone();
    match param {
        SweepParam::ComfortThreshold => c.reward.threshold = value,
        SweepParam::EnergyWeight => c.reward.beta = value,
    }
    c
}

/// Runs every `(value, seed)` cell sequentially under `out`. A failing cell is
/// recorded in its row and the sweep carries on.
pub fn sweep(cfg: &ExperimentConfig, comfort: &ComfortModel, out: &Path) -> Result<Vec<SweepRow>, HarnessError> {
    if cfg.sweep_values.len() < 2 {
        return Err(HarnessError::Config("a sweep needs at least two values".into()));
    }
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let param = cfg.sweep_param;
    let mut rows = Vec::new();
    for (i, &value) in cfg.sweep_values.iter().enumerate() {
        let cell_cfg = with_param(cfg, param, value);
        let mut row = SweepRow {
            value,
            runs: Vec::new(),
            failed_seeds: Vec::new(),
        };
        for &seed in &cfg.seeds {
            let dir = out.join(format!("{i}_{}_{value}", param.name())).join(format!("seed_{seed}"));
            match run_experiment(&cell_cfg, comfort, seed, &dir) {
                Ok(art) => row.runs.push(art.summary),
                Err(_) => row.failed_seeds.push(seed),
            }
        }
        rows.push(row);
    }
    let mut csv = format!("{SWEEP_HEADER}\n");
    for r in &rows {
        let failed: Vec<String> = r.failed_seeds.iter().map(u64::to_string).collect();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            param.name(),
            r.value,
            r.runs.len(),
            r.mean_energy_kwh(),
            r.mean_abs_comfort(),
            r.comfort_fraction(),
            r.final_avg100_reward(),
            failed.join(";")
        )
        .unwrap();
    }
    std::fs::write(out.join("sweep.csv"), csv)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub index: usize,
    pub algo: Algo,
    pub seed: u64,
    /// `None` when the run failed.
    pub summary: Option<RunSummary>,
    pub avg100_curve: Vec<f64>,
}

/// Trains every listed algorithm on the same environment and seeds, writing
/// `comparison.csv` (one row per run) and `curves.csv` (trailing averages).
pub fn compare_agents(cfg: &ExperimentConfig, comfort: &ComfortModel, out: &Path) -> Result<Vec<CompareRow>, HarnessError> {
    if cfg.compare_algos.len() < 2 {
        return Err(HarnessError::Config("a comparison needs at least two algorithms".into()));
    }
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    for (index, &algo) in cfg.compare_algos.iter().enumerate() {
        let mut cell_cfg = cfg.clone();
        cell_cfg.algo = algo;
        for &seed in &cfg.seeds {
            let dir = out.join(format!("{index}_{}", algo.name())).join(format!("seed_{seed}"));
            let (summary, avg100_curve) = match run_experiment(&cell_cfg, comfort, seed, &dir) {
                Ok(art) => {
                    let curve = read_metrics_csv(&art.metrics_csv)?.iter().map(|m| m.avg100_reward).collect();
                    (Some(art.summary), curve)
                }
                Err(_) => (None, Vec::new()),
            };
            rows.push(CompareRow {
                index,
                algo,
                seed,
                summary,
                avg100_curve,
            });
        }
    }
    let mut table = format!("{COMPARE_HEADER}\n");
    let mut curves = format!("{CURVES_HEADER}\n");
    for r in &rows {
        let nan = f64::NAN;
        let s = r.summary.as_ref();
        writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            r.index,
            r.algo.name(),
            r.seed,
            s.and_then(|s| s.final_avg100_reward).unwrap_or(nan),
            s.map_or(nan, |s| s.mean_energy_kwh),
            s.map_or(nan, |s| s.mean_abs_comfort),
            s.map_or(nan, |s| s.comfort_fraction),
            s.map_or(nan, |s| s.mean_reward),
        )
        .unwrap();
        for (ep, v) in r.avg100_curve.iter().enumerate() {
            writeln!(curves, "{},{},{},{ep},{v}", r.index, r.algo.name(), r.seed).unwrap();
        }
    }
    std::fs::write(out.join("comparison.csv"), table)?;
    std::fs::write(out.join("curves.csv"), curves)?;
    Ok(rows)
}
