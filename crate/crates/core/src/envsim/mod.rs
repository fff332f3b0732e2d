//! Building thermal environment: zone physics, weather, reward and the
//! episodic MDP surface.

mod env;
mod reward;
mod weather;
mod zone;

pub use env::{
    write_trajectory_csv, ComfortEstimator, HvacEnv, OracleComfort, StepOutcome, TrajectoryRow, EPISODE_SLOTS,
    TRAJECTORY_HEADER,
};
pub use reward::{comfort_penalty, reward, RewardConfig};
pub use weather::{load_weather_csv, SyntheticWeather, WeatherSeries, WeatherSource, WEATHER_HEADER};
pub use zone::{
    humidity_ratio, relative_humidity, step_zone, ControlAction, ThermalState, ZoneConfig, HUMIDITY_SETPOINT_RANGE,
    SUBSTEPS_PER_SLOT, TEMP_DEADBAND, TEMP_SETPOINT_RANGE,
};

use thiserror::Error;

use crate::comfort::ComfortError;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("weather: {0}")]
    Weather(String),
    #[error("weather line {line}: {reason}")]
    WeatherRow { line: usize, reason: String },
    #[error("hour {hour} beyond weather series [{first}, {last}]")]
    BeyondSeries { hour: f64, first: f64, last: f64 },
    #[error("set-points ({temp}, {humidity}) outside admissible bounds")]
    ActionOutOfBounds { temp: f64, humidity: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid zone configuration: {0}")]
    InvalidConfig(String),
    #[error("zone dynamics diverged")]
    Diverged,
    #[error("environment has not been reset")]
    Uninitialized,
    #[error("episode finished; call reset")]
    EpisodeOver,
    #[error(transparent)]
    Comfort(#[from] ComfortError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
