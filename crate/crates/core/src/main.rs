use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hvac_control::comfort::{evaluate_mse, generate_dataset, load_dataset, save_dataset, train_comfort_model};
use hvac_control::harness::{
    compare_agents, evaluate_checkpoint, prepare_comfort, run_experiment, sweep, ExperimentConfig, HarnessError,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hvacctl", version, about = "Train and evaluate HVAC set-point controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (`section.key = value` lines). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `run.seeds` with a single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path. Defaults to `run.output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the comfort predictor and save it as `comfort_model.txt`.
    TrainComfort(Common),
    /// Write a synthetic comfort dataset labelled by the PMV oracle.
    GenComfortData(Common),
    /// Train and evaluate the configured agent once per seed.
    Train(Common),
    /// Evaluate a saved checkpoint with exploration off.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Sweep the comfort threshold or the energy weight.
    Sweep(Common),
    /// Train several algorithms on identical environments and seeds.
    Compare(Common),
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, PathBuf), HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg = cfg.with_seeds(vec![seed]);
        }
        let out = self.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        Ok((cfg, out))
    }
}

fn print(value: serde_json::Value) {
    println!("{value}");
}

fn train_comfort(common: &Common) -> Result<(), HarnessError> {
    let (cfg, out) = common.load()?;
    let spec = &cfg.comfort;
    let seed = common.seed.unwrap_or(spec.data_seed);
    let samples = match &spec.data {
        Some(path) => load_dataset(path)?,
        None => generate_dataset(&spec.grid, spec.noise_sigma, seed)?,
    };
    let (model, report) = train_comfort_model(&samples, &spec.train)?;
    std::fs::create_dir_all(&out)?;
    let path = out.join("comfort_model.txt");
    model.save(&path)?;
    let test: Vec<_> = report.test_indices.iter().map(|&i| samples[i]).collect();
    print(json!({
        "model": path,
        "samples": samples.len(),
        "best_epoch": report.best_epoch,
        "test_mse": evaluate_mse(&model, &test)?,
    }));
    Ok(())
}

fn gen_comfort_data(common: &Common) -> Result<(), HarnessError> {
    let (cfg, out) = common.load()?;
    let seed = common.seed.unwrap_or(cfg.comfort.data_seed);
    let samples = generate_dataset(&cfg.comfort.grid, cfg.comfort.noise_sigma, seed)?;
    let path = if out.extension().is_some() { out } else { out.join("comfort_data.csv") };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    save_dataset(&path, &samples)?;
    print(json!({ "data": path, "samples": samples.len() }));
    Ok(())
}

fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed_{seed}"))
}

fn train(common: &Common) -> Result<(), HarnessError> {
    let (cfg, out) = common.load()?;
    cfg.validate()?;
    let comfort = prepare_comfort(&cfg.comfort)?;
    for &seed in &cfg.seeds {
        let art = run_experiment(&cfg, &comfort, seed, &seed_dir(&out, seed))?;
        print(json!({ "dir": art.dir, "summary": art.summary }));
    }
    Ok(())
}

fn eval(common: &Common, checkpoint: &Path) -> Result<(), HarnessError> {
    let (cfg, out) = common.load()?;
    cfg.validate()?;
    let comfort = prepare_comfort(&cfg.comfort)?;
    for &seed in &cfg.seeds {
        let dir = seed_dir(&out, seed);
        let summary = evaluate_checkpoint(&cfg, &comfort, checkpoint, seed, &dir)?;
        print(json!({ "dir": dir, "summary": summary }));
    }
    Ok(())
}

fn run_sweep(common: &Common) -> Result<(), HarnessError> {
    let (cfg, out) = common.load()?;
    let comfort = prepare_comfort(&cfg.comfort)?;
    let rows = sweep(&cfg, &comfort, &out)?;
    for r in &rows {
        print(json!({
            "param": cfg.sweep_param.name(),
            "value": r.value,
            "runs_ok": r.runs.len(),
            "failed_seeds": r.failed_seeds,
            "mean_energy_kwh": r.mean_energy_kwh(),
            "mean_abs_comfort": r.mean_abs_comfort(),
        }));
    }
    Ok(())
}

fn run_compare(common: &Common) -> Result<(), HarnessError> {
    let (cfg, out) = common.load()?;
    let comfort = prepare_comfort(&cfg.comfort)?;
    for r in compare_agents(&cfg, &comfort, &out)? {
        print(json!({ "index": r.index, "algo": r.algo.name(), "seed": r.seed, "summary": r.summary }));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::TrainComfort(c) => train_comfort(c),
        Command::GenComfortData(c) => gen_comfort_data(c),
        Command::Train(c) => train(c),
        Command::Eval { common, checkpoint } => eval(common, checkpoint),
        Command::Sweep(c) => run_sweep(c),
        Command::Compare(c) => run_compare(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string(), "kind": e.kind() }));
            ExitCode::FAILURE
        }
    }
}
