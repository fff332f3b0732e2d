use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::reward::{reward, RewardConfig};
use super::weather::WeatherSource;
use super::zone::{step_zone, ControlAction, ThermalState, ZoneConfig};
use super::EnvError;
use crate::comfort::{pmv_oracle, predict_comfort, ComfortDefaults, ComfortError, ComfortModel, VOTE_LIMIT};

pub const EPISODE_SLOTS: usize = 48;
pub const TRAJECTORY_HEADER: &str = "t,T_in,H_in,T_out,H_out,T_set,H_set,M,P,R";

const RESET_TEMP: (f64, f64) = (22.0, 30.0);
const RESET_HUMIDITY: (f64, f64) = (50.0, 85.0);

/// Maps indoor conditions to a comfort vote.
pub trait ComfortEstimator {
    fn comfort(&self, indoor_temp: f64, indoor_humidity: f64, defaults: &ComfortDefaults) -> Result<f64, ComfortError>;
}

impl ComfortEstimator for ComfortModel {
    fn comfort(&self, indoor_temp: f64, indoor_humidity: f64, defaults: &ComfortDefaults) -> Result<f64, ComfortError> {
        predict_comfort(self, indoor_temp, indoor_humidity, defaults)
    }
}

/// Uses the analytic PMV directly instead of a learned model.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleComfort;

impl ComfortEstimator for OracleComfort {
    fn comfort(&self, indoor_temp: f64, indoor_humidity: f64, defaults: &ComfortDefaults) -> Result<f64, ComfortError> {
        Ok(pmv_oracle(&defaults.inputs(indoor_temp, indoor_humidity))?.clamp(-VOTE_LIMIT, VOTE_LIMIT))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: ThermalState,
    pub reward: f64,
    pub comfort: f64,
    pub energy_kwh: f64,
    pub done: bool,
}

/// One line of the per-slot trajectory log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub slot: u64,
    pub indoor_temp: f64,
    pub indoor_humidity: f64,
    pub outdoor_temp: f64,
    pub outdoor_humidity: f64,
    pub temp_setpoint: f64,
    pub humidity_setpoint: f64,
    pub comfort: f64,
    pub energy_kwh: f64,
    pub reward: f64,
}

impl TrajectoryRow {
    pub fn new(slot: u64, action: &ControlAction, out: &StepOutcome) -> Self {
        Self {
            slot,
            indoor_temp: out.state.indoor_temp,
            indoor_humidity: out.state.indoor_humidity,
            outdoor_temp: out.state.outdoor_temp,
            outdoor_humidity: out.state.outdoor_humidity,
            temp_setpoint: action.temp_setpoint(),
            humidity_setpoint: action.humidity_setpoint(),
            comfort: out.comfort,
            energy_kwh: out.energy_kwh,
            reward: out.reward,
        }
    }
}

pub fn write_trajectory_csv(path: &Path, rows: &[TrajectoryRow]) -> Result<(), EnvError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{TRAJECTORY_HEADER}")?;
    for r in rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{}",
            r.slot,
            r.indoor_temp,
            r.indoor_humidity,
            r.outdoor_temp,
            r.outdoor_humidity,
            r.temp_setpoint,
            r.humidity_setpoint,
            r.comfort,
            r.energy_kwh,
            r.reward
        )?;
    }
    f.flush()?;
    Ok(())
}

/// Episodic environment of 48 half-hour slots over one zone.
#[derive(Debug, Clone)]
pub struct HvacEnv {
    zone: ZoneConfig,
    weather: WeatherSource,
    reward: RewardConfig,
    defaults: ComfortDefaults,
    episode_len: usize,
    state: Option<ThermalState>,
    steps: usize,
}

impl HvacEnv {
    pub fn new(
        zone: ZoneConfig,
        weather: WeatherSource,
        reward: RewardConfig,
        defaults: ComfortDefaults,
    ) -> Result<Self, EnvError> {
        zone.validate()?;
        reward.validate()?;
        Ok(Self {
            zone,
            weather,
            reward,
            defaults,
            episode_len: EPISODE_SLOTS,
            state: None,
            steps: 0,
        })
    }

    pub fn zone(&self) -> &ZoneConfig {
        &self.zone
    }

    pub fn weather(&self) -> &WeatherSource {
        &self.weather
    }

    pub fn reward_config(&self) -> &RewardConfig {
        &self.reward
    }

    pub fn comfort_defaults(&self) -> &ComfortDefaults {
        &self.defaults
    }

    pub fn episode_len(&self) -> usize {
        self.episode_len
    }

    /// First slot of episode `episode`. Synthetic weather gives every episode
    /// its own day; a finite series is cycled over the whole episodes it covers.
    pub fn episode_start(&self, episode: u64) -> Result<u64, EnvError> {
        let len = self.episode_len as u64;
        match &self.weather {
            WeatherSource::Synthetic(_) => Ok(episode * len),
            WeatherSource::Series(s) => {
                let slots_per_hour = 60.0 / self.zone.slot_minutes;
                let first = (s.hours()[0] * slots_per_hour).ceil() as u64;
                let last = (*s.hours().last().unwrap() * slots_per_hour).floor() as u64;
                // an episode needs len + 1 observations
                let covered = last.saturating_sub(first) / len;
                if covered == 0 {
                    return Err(EnvError::Weather("series shorter than one episode".into()));
                }
                Ok(first + (episode % covered) * len)
            }
        }
    }

    /// Starts episode 0 from a seeded random indoor state.
    pub fn reset(&mut self, seed: u64) -> Result<ThermalState, EnvError> {
        self.reset_episode(seed, 0)
    }

    pub fn reset_episode(&mut self, seed: u64, episode: u64) -> Result<ThermalState, EnvError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let indoor_temp = rng.random_range(RESET_TEMP.0..RESET_TEMP.1);
        let indoor_humidity = rng.random_range(RESET_HUMIDITY.0..RESET_HUMIDITY.1);
        let slot = self.episode_start(episode)?;
        let (outdoor_temp, outdoor_humidity) = self.weather.weather_at(slot, self.zone.slot_minutes)?;
        self.start_from(ThermalState {
            indoor_temp,
            indoor_humidity,
            outdoor_temp,
            outdoor_humidity,
            slot,
        })
    }

    /// Starts an episode from an explicit state.
    pub fn start_from(&mut self, state: ThermalState) -> Result<ThermalState, EnvError> {
        state.validate()?;
        self.state = Some(state);
        self.steps = 0;
        Ok(state)
    }

    pub fn observe(&self) -> Result<ThermalState, EnvError> {
        self.state.ok_or(EnvError::Uninitialized)
    }

    pub fn is_done(&self) -> bool {
        self.steps >= self.episode_len
    }

    pub fn step<C: ComfortEstimator + ?Sized>(
        &mut self,
        action: &ControlAction,
        comfort: &C,
    ) -> Result<StepOutcome, EnvError> {
        let state = self.observe()?;
        if self.is_done() {
            return Err(EnvError::EpisodeOver);
        }
        let (next, energy_kwh) = step_zone(&state, action, &self.zone, &self.weather)?;
        let m = comfort.comfort(next.indoor_temp, next.indoor_humidity, &self.defaults)?;
        let r = reward(m, energy_kwh, &self.reward);
        self.state = Some(next);
        self.steps += 1;
        Ok(StepOutcome {
            state: next,
            reward: r,
            comfort: m,
            energy_kwh,
            done: self.is_done(),
        })
    }
}
