//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails. Learning runs are shared between criteria where the
//! configurations coincide; their artifacts stay under the cargo target tmpdir.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::fanger_reference::pmv_reference;
use hvac_control::agents::{build_action_table, DdpgAgent, DdpgConfig, EpisodeMetrics, LevelRange, Transition};
use hvac_control::comfort::{
    generate_dataset, pmv_oracle, predict_comfort, train_comfort_model, ComfortInputs, ComfortModel,
    ComfortTrainConfig, GridSpec,
};
use hvac_control::envsim::{
    comfort_penalty, reward, step_zone, ControlAction, RewardConfig, SyntheticWeather, ThermalState, WeatherSource,
    ZoneConfig,
};
use hvac_control::harness::{prepare_comfort, read_metrics_csv, run_experiment, Algo, ExperimentConfig, RunSummary};
use hvac_control::numerics::{finite_diff_gradient, Activation, DenseNet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances and budgets.
const GRAD_REL_TOL: f64 = 1e-4;
const GRAD_REL_FLOOR: f64 = 1e-6;
const GRAD_TIME: Duration = Duration::from_secs(5);
const TD_TOL: f64 = 1e-12;
const COMFORT_CLEAN_RMSE: f64 = 0.1;
const COMFORT_NOISY_RMSE: (f64, f64) = (0.75, 0.95);
const COMFORT_NOISE_SIGMA: f64 = 0.8;
const COMFORT_TIME: Duration = Duration::from_secs(120);
const FANGER_TOL: f64 = 0.01;
const LEARNING_BAND: f64 = 0.05;
const LEARNING_TIME: Duration = Duration::from_secs(15 * 60);
const LEARNING_EPISODES: usize = 300;
const THRESHOLD_TOL: f64 = 0.25;

const SEEDS: [u64; 3] = [0, 1, 2];
const THRESHOLDS: [f64; 3] = [0.0, 0.5, 1.0];
const WEIGHTS: [f64; 3] = [0.02, 0.05, 0.2];
const DEFAULT_THRESHOLD: f64 = 0.5;
const DEFAULT_WEIGHT: f64 = 0.05;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Run {
    summary: RunSummary,
    train: Vec<EpisodeMetrics>,
    elapsed: Duration,
}

/// Experiment cells keyed by (algorithm, threshold, weight, seed, episodes), each trained once.
struct Lab {
    root: PathBuf,
    comfort: ComfortModel,
    runs: BTreeMap<(String, u64, u64, u64, usize), Run>,
}

impl Lab {
    /// A cell of the default experiment config with the given overrides.
    fn cell(&mut self, algo: Algo, threshold: f64, beta: f64, seed: u64, episodes: usize) -> Result<&Run, String> {
        let key = (algo.name().to_string(), threshold.to_bits(), beta.to_bits(), seed, episodes);
        if !self.runs.contains_key(&key) {
            let mut cfg = ExperimentConfig::default();
            cfg.algo = algo;
            cfg.episodes = episodes;
            cfg.reward = RewardConfig::new(beta, threshold).map_err(|e| e.to_string())?;
            let dir = self.root.join(format!("{}_d{threshold}_b{beta}_s{seed}_e{episodes}", algo.name()));
            let t0 = Instant::now();
            let art = run_experiment(&cfg, &self.comfort, seed, &dir).map_err(|e| e.to_string())?;
            let elapsed = t0.elapsed();
            let train = read_metrics_csv(&art.metrics_csv).map_err(|e| e.to_string())?;
            self.runs.insert(
                key.clone(),
                Run {
                    summary: art.summary,
                    train,
                    elapsed,
                },
            );
        }
        Ok(&self.runs[&key])
    }

    fn run(&mut self, algo: Algo, threshold: f64, beta: f64, seed: u64) -> Result<&Run, String> {
        self.cell(algo, threshold, beta, seed, ExperimentConfig::default().episodes)
    }

    fn seed_mean(&mut self, algo: Algo, threshold: f64, beta: f64, f: impl Fn(&RunSummary) -> f64) -> Result<(f64, Vec<f64>), String> {
        let mut per_seed = Vec::new();
        for seed in SEEDS {
            per_seed.push(f(&self.run(algo, threshold, beta, seed)?.summary));
        }
        Ok((per_seed.iter().sum::<f64>() / per_seed.len() as f64, per_seed))
    }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn gradient_check() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let acts = [Activation::Tanh, Activation::Sigmoid, Activation::Linear];
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let depth = rng.random_range(1..=3);
        let sizes: Vec<usize> = (0..=depth).map(|_| rng.random_range(1..=16)).collect();
        let layer_acts: Vec<Activation> = (0..depth).map(|_| acts[rng.random_range(0..acts.len())]).collect();
        let net = DenseNet::init_uniform(&sizes, &layer_acts, &mut rng).map_err(|e| e.to_string())?;
        let input: Vec<f64> = (0..sizes[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
        let weights: Vec<f64> = (0..sizes[depth]).map(|_| rng.random_range(-1.0..1.0)).collect();
        // L = sum_k c_k y_k^2 / 2, so dL/dy_k = c_k y_k.
        let loss = |y: &[f64]| y.iter().zip(&weights).map(|(y, c)| 0.5 * c * y * y).sum::<f64>();
        let y = net.forward(&input).map_err(|e| e.to_string())?;
        let dy: Vec<f64> = y.iter().zip(&weights).map(|(y, c)| c * y).collect();
        let analytic = net.gradient(&input, &dy).map_err(|e| e.to_string())?;
        let numeric = finite_diff_gradient(&net, &input, loss).map_err(|e| e.to_string())?;
        for (a, n) in analytic.values().zip(numeric.values()) {
            let rel = (a - n).abs() / a.abs().max(n.abs()).max(GRAD_REL_FLOOR);
            worst = worst.max(rel);
        }
    }
    let elapsed = t0.elapsed();
    ensure(
        worst < GRAD_REL_TOL && elapsed < GRAD_TIME,
        format!("max relative error {worst:.2e} (< {GRAD_REL_TOL:e}), {:.2}s (< {}s)", elapsed.as_secs_f64(), GRAD_TIME.as_secs()),
    )
}

fn reward_examples() -> Outcome {
    let rc = RewardConfig::new(0.05, 0.5).map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    let mut expect = |label: &str, got: f64, want: f64| {
        if got != want {
            failures.push(format!("{label}: {got} != {want}"));
        }
    };
    expect("neutral", reward(0.0, 0.0, &rc), 0.0);
    expect("hot", reward(1.5, 10.0, &rc), -1.5);
    expect("cold", reward(-1.2, 0.0, &rc), -0.7);
    for d in [0.0, 0.25, 0.5, 1.0] {
        let edge = RewardConfig::new(0.05, d).map_err(|e| e.to_string())?;
        expect("upper edge", reward(d, 0.0, &edge), 0.0);
        expect("lower edge", reward(-d, 0.0, &edge), 0.0);
        expect("edge penalty", comfort_penalty(d, d) + comfort_penalty(-d, d), 0.0);
    }
    ensure(failures.is_empty(), if failures.is_empty() { "all examples exact".into() } else { failures.join("; ") })
}

fn ulps_apart(a: f64, b: f64) -> u64 {
    let key = |x: f64| {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

fn random_transition(rng: &mut ChaCha8Rng, terminal: bool) -> Transition {
    let mut v = |n: usize| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
    let (state, action, next_state) = (v(4), v(2), v(4));
    Transition {
        state,
        action,
        reward: rng.random_range(-3.0..0.0),
        next_state,
        terminal,
    }
}

fn soft_update_exact() -> Outcome {
    let cfg = DdpgConfig::default();
    let tau = 0.001;
    if cfg.tau != tau {
        return Err(format!("default tau is {}", cfg.tau));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut agent = DdpgAgent::new(4, 2, &cfg, &mut rng).map_err(|e| e.to_string())?;
    let batch: Vec<Transition> = (0..128).map(|i| random_transition(&mut rng, i % 7 == 0)).collect();
    let refs: Vec<&Transition> = batch.iter().collect();
    let (mut worst, mut checked) = (0u64, 0usize);
    for _ in 0..5 {
        let prev_actor: Vec<f64> = agent.actor_target.params().collect();
        let prev_critic: Vec<f64> = agent.critic_target.params().collect();
        agent.update(&refs).map_err(|e| e.to_string())?;
        for (online, target, prev) in [
            (&agent.actor, &agent.actor_target, &prev_actor),
            (&agent.critic, &agent.critic_target, &prev_critic),
        ] {
            for ((s, t), p) in online.params().zip(target.params()).zip(prev) {
                worst = worst.max(ulps_apart(t, tau * s + (1.0 - tau) * p));
                checked += 1;
            }
        }
    }
    ensure(worst <= 1, format!("{checked} target parameters over 5 updates, max deviation {worst} ulp (<= 1)"))
}

fn td_target_cases() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let t = random_transition(&mut rng, false);
    let undiscounted = DdpgAgent::new(4, 2, &DdpgConfig { gamma: 0.0, ..Default::default() }, &mut rng).map_err(|e| e.to_string())?;
    let mut agent = DdpgAgent::new(4, 2, &DdpgConfig::default(), &mut rng).map_err(|e| e.to_string())?;
    let gamma0 = undiscounted.td_target(&t).map_err(|e| e.to_string())?;
    let terminal = agent
        .td_target(&Transition { terminal: true, ..t.clone() })
        .map_err(|e| e.to_string())?;
    // A target critic with zero weights and output bias 10 returns 10 everywhere.
    for k in 0..agent.critic_target.num_layers() {
        agent.critic_target.weight_mut(k).fill(0.0);
    }
    let last = agent.critic_target.num_layers() - 1;
    agent.critic_target.bias_mut(last).fill(10.0);
    let arithmetic = agent
        .td_target(&Transition { reward: 1.0, ..t.clone() })
        .map_err(|e| e.to_string())?;
    ensure(
        gamma0 == t.reward && terminal == t.reward && (arithmetic - 10.9).abs() < TD_TOL && agent.gamma == 0.99,
        format!("gamma=0 -> {gamma0} (R={}), terminal -> {terminal}, 1 + 0.99*10 -> {arithmetic}", t.reward),
    )
}

fn comfort_rmse(model: &ComfortModel, samples: &[hvac_control::comfort::ComfortSample]) -> Result<f64, String> {
    let mut se = 0.0;
    for s in samples {
        let p = model.predict_features(&s.features()).map_err(|e| e.to_string())?;
        se += (p - s.vote).powi(2);
    }
    Ok((se / samples.len() as f64).sqrt())
}

fn comfort_fidelity() -> Outcome {
    let t0 = Instant::now();
    let clean_grid = GridSpec::default();
    let clean = generate_dataset(&clean_grid, 0.0, 21).map_err(|e| e.to_string())?;
    let (clean_model, _) = train_comfort_model(&clean, &ComfortTrainConfig::default()).map_err(|e| e.to_string())?;
    let clean_test = generate_dataset(&GridSpec { count: 1000, ..clean_grid }, 0.0, 22).map_err(|e| e.to_string())?;
    let clean_rmse = comfort_rmse(&clean_model, &clean_test)?;

    // Indoor box where the labels rarely reach the [-3, 3] clamp.
    let box_grid = GridSpec {
        air_temp: (20.0, 28.0),
        rel_humidity: (30.0, 70.0),
        metabolic_rate: (1.0, 1.2),
        clothing: (0.5, 0.8),
        ..GridSpec::default()
    };
    let noisy = generate_dataset(&box_grid, COMFORT_NOISE_SIGMA, 23).map_err(|e| e.to_string())?;
    let (noisy_model, _) = train_comfort_model(&noisy, &ComfortTrainConfig::default()).map_err(|e| e.to_string())?;
    let noisy_test = generate_dataset(&GridSpec { count: 1000, ..box_grid }, COMFORT_NOISE_SIGMA, 24).map_err(|e| e.to_string())?;
    let noisy_rmse = comfort_rmse(&noisy_model, &noisy_test)?;
    let elapsed = t0.elapsed();
    ensure(
        clean_rmse < COMFORT_CLEAN_RMSE
            && (COMFORT_NOISY_RMSE.0..=COMFORT_NOISY_RMSE.1).contains(&noisy_rmse)
            && elapsed < COMFORT_TIME,
        format!(
            "noiseless RMSE {clean_rmse:.4} (< {COMFORT_CLEAN_RMSE}), noisy RMSE {noisy_rmse:.4} (in [{}, {}]), {:.1}s (< {}s)",
            COMFORT_NOISY_RMSE.0,
            COMFORT_NOISY_RMSE.1,
            elapsed.as_secs_f64(),
            COMFORT_TIME.as_secs()
        ),
    )
}

fn fanger_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let inputs = ComfortInputs {
            air_temp: rng.random_range(10.0..40.0),
            rel_humidity: rng.random_range(0.0..100.0),
            mean_radiant_temp: rng.random_range(10.0..40.0),
            air_speed: rng.random_range(0.0..1.0),
            metabolic_rate: rng.random_range(0.8..2.0),
            clothing: rng.random_range(0.0..1.5),
        };
        let got = pmv_oracle(&inputs).map_err(|e| e.to_string())?;
        let want = pmv_reference(
            inputs.air_temp,
            inputs.rel_humidity,
            inputs.mean_radiant_temp,
            inputs.air_speed,
            inputs.metabolic_rate,
            inputs.clothing,
        );
        worst = worst.max((got - want).abs());
    }
    let mut monotone = true;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=140 {
        let ta = 18.0 + 0.1 * i as f64;
        let v = pmv_oracle(&ComfortInputs {
            air_temp: ta,
            rel_humidity: 50.0,
            mean_radiant_temp: ta,
            air_speed: 0.1,
            metabolic_rate: 1.2,
            clothing: 0.5,
        })
        .map_err(|e| e.to_string())?;
        monotone &= v > prev;
        prev = v;
    }
    ensure(
        worst < FANGER_TOL && monotone,
        format!("max |oracle - reference| {worst:.2e} over 100 points (< {FANGER_TOL}), increasing over 18-32 C: {monotone}"),
    )
}

fn action_count() -> Outcome {
    let table = build_action_table(LevelRange::half_open(15.0, 35.0, 0.1), LevelRange::closed(0.0, 100.0, 1.0))
        .map_err(|e| e.to_string())?;
    let (t, h) = (table.temp_levels().len(), table.humidity_levels().len());
    ensure(t == 200 && h == 101 && table.len() == 20_200, format!("{t} x {h} = {} actions", table.len()))
}

fn physics_sanity() -> Outcome {
    let still = ZoneConfig {
        occupants: 0.0,
        computers: 0.0,
        ..ZoneConfig::default()
    };
    let constant = |t, h| WeatherSource::Synthetic(SyntheticWeather::constant(t, h));
    let state = |t_in, h_in, t_out, h_out| ThermalState {
        indoor_temp: t_in,
        indoor_humidity: h_in,
        outdoor_temp: t_out,
        outdoor_humidity: h_out,
        slot: 0,
    };
    let err = |e: hvac_control::envsim::EnvError| e.to_string();

    let eq = state(26.0, 60.0, 26.0, 60.0);
    let (next, p) = step_zone(&eq, &ControlAction::new(26.0, 60.0).map_err(err)?, &still, &constant(26.0, 60.0)).map_err(err)?;
    let fixed_point = next.indoor_temp == 26.0 && next.indoor_humidity == 60.0 && p == 0.0;

    let floating = ZoneConfig {
        hvac_capacity: 0.0,
        ..still.clone()
    };
    let weather = constant(32.0, 60.0);
    let mut s = state(22.0, 50.0, 32.0, 60.0);
    let mut relaxes = true;
    for _ in 0..48 {
        let (next, p) = step_zone(&s, &ControlAction::new(20.0, 40.0).map_err(err)?, &floating, &weather).map_err(err)?;
        relaxes &= p == 0.0 && next.indoor_temp > s.indoor_temp && next.indoor_temp < 32.0;
        s = next;
    }

    let zone = ZoneConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut min_p = f64::INFINITY;
    for _ in 0..10_000 {
        let weather = WeatherSource::Synthetic(SyntheticWeather {
            seed: rng.random_range(0..1000),
            ..SyntheticWeather::default()
        });
        let s = ThermalState {
            slot: rng.random_range(0..20_000),
            ..state(rng.random_range(10.0..40.0), rng.random_range(0.0..100.0), 0.0, 0.0)
        };
        let (to, ho) = weather.weather_at(s.slot, zone.slot_minutes).map_err(err)?;
        let s = ThermalState {
            outdoor_temp: to,
            outdoor_humidity: ho,
            ..s
        };
        let a = ControlAction::new(rng.random_range(15.0..35.0), rng.random_range(0.0..100.0)).map_err(err)?;
        let (_, p) = step_zone(&s, &a, &zone, &weather).map_err(err)?;
        min_p = min_p.min(p);
    }
    ensure(
        fixed_point && relaxes && min_p >= 0.0,
        format!("fixed point exact: {fixed_point}, free-float monotone toward ambient: {relaxes}, min P over 10000 slots {min_p:.4} kWh"),
    )
}

fn learning_progress(lab: &mut Lab) -> Outcome {
    let run = lab.cell(Algo::Ddpg, DEFAULT_THRESHOLD, DEFAULT_WEIGHT, SEEDS[0], LEARNING_EPISODES)?;
    if run.train.len() != LEARNING_EPISODES {
        return Err(format!("{} training episodes", run.train.len()));
    }
    let first10 = run.train[..10].iter().map(|m| m.reward).sum::<f64>() / 10.0;
    let avg = &run.train.last().unwrap().avg100_reward;
    // Within the final 50 episodes no trailing average falls more than 5 % of
    // its magnitude below the best value reached so far in that window.
    let tail: Vec<f64> = run.train[run.train.len() - 50..].iter().map(|m| m.avg100_reward).collect();
    let mut best = f64::NEG_INFINITY;
    let mut worst_drop = 0.0f64;
    for &v in &tail {
        best = best.max(v);
        worst_drop = worst_drop.max((best - v) / best.abs());
    }
    let secs = run.elapsed.as_secs_f64();
    ensure(
        *avg > first10 && worst_drop <= LEARNING_BAND && run.elapsed < LEARNING_TIME,
        format!(
            "final avg100 {avg:.3} vs first-10 mean {first10:.3}, largest drop over final 50 {:.2}% (<= {}%), {secs:.0}s (< {}s)",
            100.0 * worst_drop,
            100.0 * LEARNING_BAND,
            LEARNING_TIME.as_secs()
        ),
    )
}

fn threshold_trend(lab: &mut Lab) -> Outcome {
    let mut comfort = Vec::new();
    let mut energy = Vec::new();
    let mut detail = Vec::new();
    for d in THRESHOLDS {
        let (m, per_seed) = lab.seed_mean(Algo::Ddpg, d, DEFAULT_WEIGHT, |s| s.mean_abs_comfort)?;
        let (e, _) = lab.seed_mean(Algo::Ddpg, d, DEFAULT_WEIGHT, |s| s.mean_energy_kwh)?;
        detail.push(format!("D={d}: |M| {m:.3} {} E {e:.4}", fmt_list(&per_seed)));
        comfort.push(m);
        energy.push(e);
    }
    let close = THRESHOLDS.iter().zip(&comfort).all(|(d, m)| (m - d).abs() <= THRESHOLD_TOL);
    ensure(
        close && non_increasing(&energy),
        format!("{}; |M| within {THRESHOLD_TOL} of D: {close}, energy non-increasing: {}", detail.join("; "), non_increasing(&energy)),
    )
}

fn weight_trend(lab: &mut Lab) -> Outcome {
    let mut energy = Vec::new();
    for b in WEIGHTS {
        energy.push(lab.seed_mean(Algo::Ddpg, DEFAULT_THRESHOLD, b, |s| s.mean_energy_kwh)?.0);
    }
    ensure(
        non_increasing(&energy),
        format!("seed-mean energy per slot for beta {WEIGHTS:?}: {}", fmt_list(&energy)),
    )
}

fn baseline_ordering(lab: &mut Lab) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for seed in SEEDS {
        let mut cell = |algo| -> Result<(f64, f64), String> {
            let s = &lab.run(algo, DEFAULT_THRESHOLD, DEFAULT_WEIGHT, seed)?.summary;
            Ok((s.final_avg100_reward.unwrap_or(f64::NAN), s.mean_energy_kwh))
        };
        let ddpg = cell(Algo::Ddpg)?;
        let q = cell(Algo::QLearning)?;
        let sarsa = cell(Algo::Sarsa)?;
        ok &= ddpg.0 >= q.0 && ddpg.0 >= sarsa.0 && ddpg.1 <= q.1 && ddpg.1 <= sarsa.1;
        detail.push(format!(
            "seed {seed}: avg100 ddpg {:.3} q {:.3} sarsa {:.3}, E ddpg {:.4} q {:.4} sarsa {:.4}",
            ddpg.0, q.0, sarsa.0, ddpg.1, q.1, sarsa.1
        ));
    }
    ensure(ok, detail.join("; "))
}

fn determinism(root: &Path) -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hvacctl");
    let cfg_path = root.join("determinism.cfg");
    std::fs::create_dir_all(root).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    let mut ok = true;
    for algo in ["ddpg", "q_learning", "sarsa", "dqn"] {
        std::fs::write(&cfg_path, format!("run.algo = {algo}\nrun.episodes = 30\nrun.eval_episodes = 2\n")).map_err(|e| e.to_string())?;
        let mut files = Vec::new();
        for rep in 0..2 {
            let out = root.join(format!("determinism_{algo}_{rep}"));
            let status = Command::new(bin)
                .args(["train", "--seed", "5", "--config"])
                .arg(&cfg_path)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!("{algo}: {}", String::from_utf8_lossy(&status.stderr)));
            }
            files.push(std::fs::read(out.join("seed_5").join("metrics.csv")).map_err(|e| e.to_string())?);
        }
        let same = files[0] == files[1];
        ok &= same;
        detail.push(format!("{algo}: {}", if same { "identical" } else { "differ" }));
    }
    ensure(ok, format!("metrics.csv from two `train` runs, 30 episodes: {}", detail.join(", ")))
}

fn report(id: u32, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let (status, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id:>2} {status} {name}: {detail} [{:.1}s]", t0.elapsed().as_secs_f64());
    outcome.is_ok()
}

fn main() -> ExitCode {
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let _ = std::fs::remove_dir_all(&root);
    let mut results = vec![
        report(1, "gradient correctness", gradient_check),
        report(2, "reward examples", reward_examples),
        report(3, "soft target update", soft_update_exact),
        report(4, "TD target", td_target_cases),
        report(5, "comfort model fidelity", comfort_fidelity),
        report(6, "Fanger oracle", fanger_oracle),
        report(7, "action count", action_count),
        report(8, "physics sanity", physics_sanity),
    ];

    let comfort = prepare_comfort(&ExperimentConfig::default().comfort);
    match comfort {
        Ok(comfort) => {
            // Spot check that the shared model tracks the oracle in the operating range.
            let d = ExperimentConfig::default().comfort.defaults;
            let probe = predict_comfort(&comfort, 25.0, 50.0, &d).unwrap_or(f64::NAN);
            let oracle = pmv_oracle(&d.inputs(25.0, 50.0)).unwrap_or(f64::NAN);
            println!("shared comfort model at 25 C / 50 %: {probe:.3} (oracle {oracle:.3})");
            let mut lab = Lab {
                root: root.clone(),
                comfort,
                runs: BTreeMap::new(),
            };
            results.push(report(9, "DDPG learning progress", || learning_progress(&mut lab)));
            results.push(report(10, "threshold trend", || threshold_trend(&mut lab)));
            results.push(report(11, "energy weight trend", || weight_trend(&mut lab)));
            results.push(report(12, "baseline ordering", || baseline_ordering(&mut lab)));
        }
        Err(e) => {
            for (id, name) in [(9, "DDPG learning progress"), (10, "threshold trend"), (11, "energy weight trend"), (12, "baseline ordering")] {
                results.push(report(id, name, || Err(format!("comfort model: {e}"))));
            }
        }
    }
    results.push(report(13, "determinism", || determinism(&root)));

    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
