use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::HarnessError;
use crate::agents::{DdpgConfig, DqnConfig, LevelRange, TabularAlgo, TabularConfig};
use crate::comfort::{ComfortDefaults, ComfortTrainConfig, GridSpec};
use crate::envsim::{RewardConfig, SyntheticWeather, ZoneConfig};

/// Recognised configuration keys with a one-line description each.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("run.algo", "ddpg | q_learning | sarsa | dqn"),
    ("run.episodes", "training episodes"),
    ("run.eval_episodes", "greedy evaluation episodes after training"),
    ("run.seeds", "comma-separated run seeds"),
    ("run.output_dir", "artifact directory (overridden by --out)"),
    ("reward.beta", "weight of energy cost"),
    ("reward.threshold", "comfort threshold D"),
    ("zone.floor_area", "m2"),
    ("zone.ceiling_height", "m"),
    ("zone.occupants", "count"),
    ("zone.computers", "count"),
    ("zone.air_change_rate", "1/h"),
    ("zone.thermal_capacitance", "kJ/K"),
    ("zone.envelope_resistance", "K/kW"),
    ("zone.hvac_capacity", "kW"),
    ("zone.cop", "coefficient of performance"),
    ("zone.slot_minutes", "control slot length"),
    ("weather.source", "synthetic | csv"),
    ("weather.path", "hourly CSV with header hour,temp_c,rh_pct"),
    ("weather.temp_mean", "synthetic mean temperature, C"),
    ("weather.temp_amplitude", "synthetic diurnal amplitude, C"),
    ("weather.rh_mean", "synthetic mean humidity, %"),
    ("weather.rh_amplitude", "synthetic diurnal humidity amplitude, %"),
    ("weather.peak_hour", "hour of peak temperature"),
    ("weather.noise_sigma", "hourly temperature noise, C"),
    ("weather.daily_sigma", "day-to-day temperature offset, C"),
    ("weather.seed", "synthetic weather seed (defaults to the run seed)"),
    ("comfort.model", "trained comfort model file; trained from synthetic data when absent"),
    ("comfort.data", "comfort CSV used for training instead of synthetic data"),
    ("comfort.samples", "synthetic training samples"),
    ("comfort.noise_sigma", "synthetic vote noise"),
    ("comfort.data_seed", "synthetic data seed"),
    ("comfort.epochs", "training epochs"),
    ("comfort.hidden", "comma-separated hidden sizes"),
    ("comfort.learning_rate", "Adam learning rate"),
    ("comfort.alpha1", "data-fit weight"),
    ("comfort.alpha2", "weight-decay weight"),
    ("comfort.air_speed", "assumed indoor air speed, m/s"),
    ("comfort.met", "assumed metabolic rate, met"),
    ("comfort.clo", "assumed clothing insulation, clo"),
    ("ddpg.hidden", "comma-separated hidden sizes"),
    ("ddpg.gamma", "discount factor"),
    ("ddpg.tau", "target blending rate"),
    ("ddpg.actor_lr", "actor learning rate"),
    ("ddpg.critic_lr", "critic learning rate"),
    ("ddpg.batch_size", "minibatch size"),
    ("ddpg.replay_capacity", "replay buffer capacity"),
    ("ddpg.min_replay", "transitions before updates start"),
    ("ddpg.ou_theta", "OU mean reversion"),
    ("ddpg.ou_sigma", "OU volatility"),
    ("ddpg.noise_initial", "initial noise scale"),
    ("ddpg.noise_final", "final noise scale"),
    ("ddpg.noise_episodes", "episodes of linear noise decay"),
    ("tabular.alpha", "learning rate"),
    ("tabular.gamma", "discount factor"),
    ("tabular.epsilon_initial", "initial exploration rate"),
    ("tabular.epsilon_final", "final exploration rate"),
    ("tabular.epsilon_episodes", "episodes of linear epsilon decay"),
    ("tabular.temp_bin", "state bin width for temperatures, C"),
    ("tabular.humidity_bin", "state bin width for humidities, %"),
    ("tabular.initial_q", "value of unvisited table entries"),
    ("dqn.hidden", "comma-separated hidden sizes"),
    ("dqn.gamma", "discount factor"),
    ("dqn.tau", "target blending rate"),
    ("dqn.learning_rate", "Adam learning rate"),
    ("dqn.batch_size", "minibatch size"),
    ("dqn.replay_capacity", "replay buffer capacity"),
    ("dqn.min_replay", "transitions before updates start"),
    ("dqn.epsilon_initial", "initial exploration rate"),
    ("dqn.epsilon_final", "final exploration rate"),
    ("dqn.epsilon_episodes", "episodes of linear epsilon decay"),
    ("actions.temp_step", "discrete temperature granularity, C"),
    ("actions.humidity_step", "discrete humidity granularity, %"),
    ("sweep.param", "comfort_threshold | energy_weight"),
    ("sweep.values", "comma-separated sweep values"),
    ("compare.algos", "comma-separated algorithms"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Ddpg,
    QLearning,
    Sarsa,
    Dqn,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Ddpg => "ddpg",
            Algo::QLearning => "q_learning",
            Algo::Sarsa => "sarsa",
            Algo::Dqn => "dqn",
        }
    }

    pub fn tabular(self) -> Option<TabularAlgo> {
        match self {
            Algo::QLearning => Some(TabularAlgo::QLearning),
            Algo::Sarsa => Some(TabularAlgo::Sarsa),
            _ => None,
        }
    }
}

impl FromStr for Algo {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ddpg" => Ok(Algo::Ddpg),
            "q_learning" | "qlearning" => Ok(Algo::QLearning),
            "sarsa" => Ok(Algo::Sarsa),
            "dqn" => Ok(Algo::Dqn),
            other => Err(HarnessError::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    ComfortThreshold,
    EnergyWeight,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::ComfortThreshold => "comfort_threshold",
            SweepParam::EnergyWeight => "energy_weight",
        }
    }
}

impl FromStr for SweepParam {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "comfort_threshold" | "threshold" | "D" => Ok(SweepParam::ComfortThreshold),
            "energy_weight" | "beta" => Ok(SweepParam::EnergyWeight),
            other => Err(HarnessError::Config(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeatherSpec {
    Synthetic { params: SyntheticWeather, seed: Option<u64> },
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComfortSpec {
    pub model: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub grid: GridSpec,
    pub noise_sigma: f64,
    pub data_seed: u64,
    pub train: ComfortTrainConfig,
    pub defaults: ComfortDefaults,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub episodes: usize,
    pub eval_episodes: usize,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub zone: ZoneConfig,
    pub weather: WeatherSpec,
    pub reward: RewardConfig,
    pub comfort: ComfortSpec,
    pub ddpg: DdpgConfig,
    pub tabular: TabularConfig,
    pub dqn: DqnConfig,
    pub temp_step: f64,
    pub humidity_step: f64,
    pub sweep_param: SweepParam,
    pub sweep_values: Vec<f64>,
    pub compare_algos: Vec<Algo>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            algo: Algo::Ddpg,
            episodes: 500,
            eval_episodes: 100,
            seeds: vec![0],
            output_dir: PathBuf::from("runs"),
            zone: ZoneConfig::default(),
            weather: WeatherSpec::Synthetic {
                params: SyntheticWeather::default(),
                seed: None,
            },
            reward: RewardConfig::default(),
            comfort: ComfortSpec {
                model: None,
                data: None,
                grid: GridSpec::default(),
                noise_sigma: 0.0,
                data_seed: 0,
                train: ComfortTrainConfig::default(),
                defaults: ComfortDefaults::default(),
            },
            ddpg: DdpgConfig::default(),
            tabular: TabularConfig::default(),
            dqn: DqnConfig::default(),
            temp_step: 1.0,
            humidity_step: 5.0,
            sweep_param: SweepParam::ComfortThreshold,
            sweep_values: vec![0.0, 0.5, 1.0],
            compare_algos: vec![Algo::Ddpg, Algo::QLearning, Algo::Sarsa],
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| HarnessError::Config(format!("{key}: cannot parse `{value}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, HarnessError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s.trim()))
        .collect()
}

impl ExperimentConfig {
    /// Parses `section.key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        let mut weather_source = "synthetic".to_string();
        let mut weather_path: Option<PathBuf> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "weather.source" => weather_source = value.to_string(),
                "weather.path" => weather_path = Some(base_dir.join(value)),
                _ => cfg
                    .set(key, value, base_dir)
                    .map_err(|e| match e {
                        HarnessError::Config(msg) => HarnessError::Config(format!("line {}: {msg}", i + 1)),
                        other => other,
                    })?,
            }
        }
        match weather_source.as_str() {
            "synthetic" => {}
            "csv" => {
                let path = weather_path.ok_or_else(|| HarnessError::Config("weather.source = csv needs weather.path".into()))?;
                cfg.weather = WeatherSpec::Csv(path);
            }
            other => return Err(HarnessError::Config(format!("unknown weather.source `{other}`"))),
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn set(&mut self, key: &str, v: &str, base_dir: &Path) -> Result<(), HarnessError> {
        match key {
            "run.algo" => self.algo = v.parse()?,
            "run.episodes" => self.episodes = parse(key, v)?,
            "run.eval_episodes" => self.eval_episodes = parse(key, v)?,
            "run.seeds" => self.seeds = parse_list(key, v)?,
            "run.output_dir" => self.output_dir = base_dir.join(v),
            "reward.beta" => self.reward.beta = parse(key, v)?,
            "reward.threshold" => self.reward.threshold = parse(key, v)?,
            "zone.floor_area" => self.zone.floor_area = parse(key, v)?,
            "zone.ceiling_height" => self.zone.ceiling_height = parse(key, v)?,
            "zone.occupants" => self.zone.occupants = parse(key, v)?,
            "zone.computers" => self.zone.computers = parse(key, v)?,
            "zone.air_change_rate" => self.zone.air_change_rate = parse(key, v)?,
            "zone.thermal_capacitance" => self.zone.thermal_capacitance = parse(key, v)?,
            "zone.envelope_resistance" => self.zone.envelope_resistance = parse(key, v)?,
            "zone.hvac_capacity" => self.zone.hvac_capacity = parse(key, v)?,
            "zone.cop" => self.zone.cop = parse(key, v)?,
            "zone.slot_minutes" => self.zone.slot_minutes = parse(key, v)?,
            k if k.starts_with("weather.") => {
                let WeatherSpec::Synthetic { params, seed } = &mut self.weather else {
                    unreachable!("weather source is resolved after parsing");
                };
                match k {
                    "weather.temp_mean" => params.temp_mean = parse(key, v)?,
                    "weather.temp_amplitude" => params.temp_amplitude = parse(key, v)?,
                    "weather.rh_mean" => params.rh_mean = parse(key, v)?,
                    "weather.rh_amplitude" => params.rh_amplitude = parse(key, v)?,
                    "weather.peak_hour" => params.peak_hour = parse(key, v)?,
                    "weather.noise_sigma" => params.noise_sigma = parse(key, v)?,
                    "weather.daily_sigma" => params.daily_sigma = parse(key, v)?,
                    "weather.seed" => *seed = Some(parse(key, v)?),
                    _ => return Err(HarnessError::Config(format!("unknown key `{key}`"))),
                }
            }
            "comfort.model" => self.comfort.model = Some(base_dir.join(v)),
            "comfort.data" => self.comfort.data = Some(base_dir.join(v)),
            "comfort.samples" => self.comfort.grid.count = parse(key, v)?,
            "comfort.noise_sigma" => self.comfort.noise_sigma = parse(key, v)?,
            "comfort.data_seed" => self.comfort.data_seed = parse(key, v)?,
            "comfort.epochs" => self.comfort.train.epochs = parse(key, v)?,
            "comfort.hidden" => {
                let h: Vec<usize> = parse_list(key, v)?;
                if h.len() != 2 {
                    return Err(HarnessError::Config("comfort.hidden needs exactly two sizes".into()));
                }
                self.comfort.train.hidden = [h[0], h[1]];
            }
            "comfort.learning_rate" => self.comfort.train.learning_rate = parse(key, v)?,
            "comfort.alpha1" => self.comfort.train.alpha1 = parse(key, v)?,
            "comfort.alpha2" => self.comfort.train.alpha2 = parse(key, v)?,
            "comfort.air_speed" => self.comfort.defaults.air_speed = parse(key, v)?,
            "comfort.met" => self.comfort.defaults.metabolic_rate = parse(key, v)?,
            "comfort.clo" => self.comfort.defaults.clothing = parse(key, v)?,
            "ddpg.hidden" => self.ddpg.hidden = parse_list(key, v)?,
            "ddpg.gamma" => self.ddpg.gamma = parse(key, v)?,
            "ddpg.tau" => self.ddpg.tau = parse(key, v)?,
            "ddpg.actor_lr" => self.ddpg.actor_lr = parse(key, v)?,
            "ddpg.critic_lr" => self.ddpg.critic_lr = parse(key, v)?,
            "ddpg.batch_size" => self.ddpg.batch_size = parse(key, v)?,
            "ddpg.replay_capacity" => self.ddpg.replay_capacity = parse(key, v)?,
            "ddpg.min_replay" => self.ddpg.min_replay = parse(key, v)?,
            "ddpg.ou_theta" => self.ddpg.ou_theta = parse(key, v)?,
            "ddpg.ou_sigma" => self.ddpg.ou_sigma = parse(key, v)?,
            "ddpg.noise_initial" => self.ddpg.noise_initial = parse(key, v)?,
            "ddpg.noise_final" => self.ddpg.noise_final = parse(key, v)?,
            "ddpg.noise_episodes" => self.ddpg.noise_episodes = parse(key, v)?,
            "tabular.alpha" => self.tabular.alpha = parse(key, v)?,
            "tabular.gamma" => self.tabular.gamma = parse(key, v)?,
            "tabular.epsilon_initial" => self.tabular.epsilon_initial = parse(key, v)?,
            "tabular.epsilon_final" => self.tabular.epsilon_final = parse(key, v)?,
            "tabular.epsilon_episodes" => self.tabular.epsilon_episodes = parse(key, v)?,
            "tabular.temp_bin" => self.tabular.temp_bin = parse(key, v)?,
            "tabular.humidity_bin" => self.tabular.humidity_bin = parse(key, v)?,
            "tabular.initial_q" => self.tabular.initial_q = parse(key, v)?,
            "dqn.hidden" => self.dqn.hidden = parse_list(key, v)?,
            "dqn.gamma" => self.dqn.gamma = parse(key, v)?,
            "dqn.tau" => self.dqn.tau = parse(key, v)?,
            "dqn.learning_rate" => self.dqn.learning_rate = parse(key, v)?,
            "dqn.batch_size" => self.dqn.batch_size = parse(key, v)?,
            "dqn.replay_capacity" => self.dqn.replay_capacity = parse(key, v)?,
            "dqn.min_replay" => self.dqn.min_replay = parse(key, v)?,
            "dqn.epsilon_initial" => self.dqn.epsilon_initial = parse(key, v)?,
            "dqn.epsilon_final" => self.dqn.epsilon_final = parse(key, v)?,
            "dqn.epsilon_episodes" => self.dqn.epsilon_episodes = parse(key, v)?,
            "actions.temp_step" => self.temp_step = parse(key, v)?,
            "actions.humidity_step" => self.humidity_step = parse(key, v)?,
            "sweep.param" => self.sweep_param = v.parse()?,
            "sweep.values" => self.sweep_values = parse_list(key, v)?,
            "compare.algos" => {
                self.compare_algos = v.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_, _>>()?
            }
            _ => return Err(HarnessError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("run.seeds must not be empty".into()));
        }
        self.zone.validate()?;
        self.reward.validate()?;
        self.ddpg.validate()?;
        self.tabular.validate()?;
        self.dqn.validate()?;
        self.action_ranges().0.levels()?;
        self.action_ranges().1.levels()?;
        for p in [&self.comfort.model, &self.comfort.data].into_iter().flatten() {
            if !p.is_file() {
                return Err(HarnessError::Config(format!("file not found: {}", p.display())));
            }
        }
        if let WeatherSpec::Csv(p) = &self.weather {
            if !p.is_file() {
                return Err(HarnessError::Config(format!("file not found: {}", p.display())));
            }
        }
        Ok(())
    }

    /// Discrete set-point grid used by the table-based agents.
    pub fn action_ranges(&self) -> (LevelRange, LevelRange) {
        (
            LevelRange::half_open(15.0, 35.0, self.temp_step),
            LevelRange::closed(0.0, 100.0, self.humidity_step),
        )
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }
}
