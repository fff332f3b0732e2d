//! Single-node (1R1C) zone with a separate moisture balance.

use super::weather::WeatherSource;
use super::EnvError;

pub const TEMP_SETPOINT_RANGE: (f64, f64) = (15.0, 35.0);
pub const HUMIDITY_SETPOINT_RANGE: (f64, f64) = (0.0, 100.0);

/// Zone temperature error below which the plant delivers no thermal power, °C.
pub const TEMP_DEADBAND: f64 = 0.1;
pub const SUBSTEPS_PER_SLOT: usize = 60;

const AIR_DENSITY: f64 = 1.2; // kg/m3
const LATENT_HEAT: f64 = 2450.0; // kJ/kg
const ATMOSPHERIC_PRESSURE: f64 = 101.325; // kPa

/// MDP state: indoor and outdoor temperature (°C) and relative humidity (%).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    pub indoor_temp: f64,
    pub indoor_humidity: f64,
    pub outdoor_temp: f64,
    pub outdoor_humidity: f64,
    pub slot: u64,
}

impl ThermalState {
    pub fn validate(&self) -> Result<(), EnvError> {
        let vals = [self.indoor_temp, self.indoor_humidity, self.outdoor_temp, self.outdoor_humidity];
        if !vals.iter().all(|v| v.is_finite()) {
            return Err(EnvError::InvalidState("non-finite component".into()));
        }
        for h in [self.indoor_humidity, self.outdoor_humidity] {
            if !(0.0..=100.0).contains(&h) {
                return Err(EnvError::InvalidState(format!("humidity {h} outside [0, 100]")));
            }
        }
        Ok(())
    }

    pub fn features(&self) -> [f64; 4] {
        [self.indoor_temp, self.indoor_humidity, self.outdoor_temp, self.outdoor_humidity]
    }
}

/// HVAC set-points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlAction {
    temp_setpoint: f64,
    humidity_setpoint: f64,
}

impl ControlAction {
    pub fn new(temp_setpoint: f64, humidity_setpoint: f64) -> Result<Self, EnvError> {
        let (tlo, thi) = TEMP_SETPOINT_RANGE;
        let (hlo, hhi) = HUMIDITY_SETPOINT_RANGE;
        if !(tlo..=thi).contains(&temp_setpoint) || !(hlo..=hhi).contains(&humidity_setpoint) {
            return Err(EnvError::ActionOutOfBounds {
                temp: temp_setpoint,
                humidity: humidity_setpoint,
            });
        }
        Ok(Self {
            temp_setpoint,
            humidity_setpoint,
        })
    }

    /// Clamps both set-points into their admissible ranges. NaN maps to the lower bound.
    pub fn clipped(temp_setpoint: f64, humidity_setpoint: f64) -> Self {
        let clamp = |v: f64, (lo, hi): (f64, f64)| if v.is_nan() { lo } else { v.clamp(lo, hi) };
        Self {
            temp_setpoint: clamp(temp_setpoint, TEMP_SETPOINT_RANGE),
            humidity_setpoint: clamp(humidity_setpoint, HUMIDITY_SETPOINT_RANGE),
        }
    }

    pub fn temp_setpoint(&self) -> f64 {
        self.temp_setpoint
    }

    pub fn humidity_setpoint(&self) -> f64 {
        self.humidity_setpoint
    }
}

/// Physical parameters of the controlled zone.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneConfig {
    pub floor_area: f64,
    pub ceiling_height: f64,
    pub occupants: f64,
    pub computers: f64,
    /// Outdoor air changes per hour.
    pub air_change_rate: f64,
    /// kJ/K
    pub thermal_capacitance: f64,
    /// K/kW
    pub envelope_resistance: f64,
    /// Sensible (and separately latent) plant limit, kW.
    pub hvac_capacity: f64,
    pub cop: f64,
    pub slot_minutes: f64,
    /// W per occupant
    pub occupant_sensible: f64,
    /// W per occupant
    pub occupant_latent: f64,
    /// W per computer with monitor
    pub computer_gain: f64,
}

impl Default for ZoneConfig {
    fn default() -> Self {
        Self {
            floor_area: 307.0,
            ceiling_height: 3.0,
            occupants: 30.0,
            computers: 40.0,
            air_change_rate: 0.67,
            thermal_capacitance: 15_000.0,
            envelope_resistance: 4.0,
            hvac_capacity: 20.0,
            cop: 3.0,
            slot_minutes: 30.0,
            occupant_sensible: 75.0,
            occupant_latent: 55.0,
            computer_gain: 120.0,
        }
    }
}

impl ZoneConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        let positive = [
            ("floor_area", self.floor_area),
            ("ceiling_height", self.ceiling_height),
            ("thermal_capacitance", self.thermal_capacitance),
            ("envelope_resistance", self.envelope_resistance),
            ("cop", self.cop),
            ("slot_minutes", self.slot_minutes),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EnvError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("occupants", self.occupants),
            ("computers", self.computers),
            ("air_change_rate", self.air_change_rate),
            ("hvac_capacity", self.hvac_capacity),
            ("occupant_sensible", self.occupant_sensible),
            ("occupant_latent", self.occupant_latent),
            ("computer_gain", self.computer_gain),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(EnvError::InvalidConfig(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn air_mass(&self) -> f64 {
        self.floor_area * self.ceiling_height * AIR_DENSITY
    }

    /// Internal sensible gain, kW.
    pub fn internal_gain(&self) -> f64 {
        (self.occupants * self.occupant_sensible + self.computers * self.computer_gain) / 1000.0
    }

    /// Internal moisture gain, kg/s.
    pub fn moisture_gain(&self) -> f64 {
        self.occupants * self.occupant_latent / 1000.0 / LATENT_HEAT
    }
}

/// Saturation vapour pressure over water, kPa (Magnus form).
fn saturation_pressure(temp: f64) -> f64 {
    0.61094 * (17.625 * temp / (temp + 243.04)).exp()
}

/// Humidity ratio (kg water / kg dry air) at a temperature and relative humidity.
pub fn humidity_ratio(temp: f64, rel_humidity: f64) -> f64 {
    let pw = rel_humidity / 100.0 * saturation_pressure(temp);
    0.622 * pw / (ATMOSPHERIC_PRESSURE - pw)
}

/// Relative humidity (%) for a humidity ratio at a temperature.
pub fn relative_humidity(temp: f64, ratio: f64) -> f64 {
    let pw = ratio * ATMOSPHERIC_PRESSURE / (0.622 + ratio);
    100.0 * pw / saturation_pressure(temp)
}

/// Advances the zone by one control slot with explicit Euler sub-steps.
///
/// Returns the next state and the electrical energy drawn by the plant in kWh.
pub fn step_zone(
    state: &ThermalState,
    action: &ControlAction,
    config: &ZoneConfig,
    weather: &WeatherSource,
) -> Result<(ThermalState, f64), EnvError> {
    state.validate()?;
    let slot_seconds = config.slot_minutes * 60.0;
    let dt = slot_seconds / SUBSTEPS_PER_SLOT as f64;
    let (out_temp, out_rh) = weather.weather_at(state.slot, config.slot_minutes)?;
    let out_ratio = humidity_ratio(out_temp, out_rh);

    let capacitance = config.thermal_capacitance;
    let resistance = config.envelope_resistance;
    let capacity = config.hvac_capacity;
    let air_mass = config.air_mass();
    let vent_flow = air_mass * config.air_change_rate / 3600.0;
    let gain = config.internal_gain();
    let moisture = config.moisture_gain();
    let max_removal = capacity / LATENT_HEAT * dt / air_mass;

    let (t0, ratio0) = (state.indoor_temp, humidity_ratio(state.indoor_temp, state.indoor_humidity));
    let (mut temp, mut ratio) = (t0, ratio0);
    let mut sensible_kj = 0.0;
    let mut latent_kj = 0.0;

    for _ in 0..SUBSTEPS_PER_SLOT {
        let envelope = (out_temp - temp) / resistance;
        let mut hvac = 0.0;
        if capacity > 0.0 && (temp - action.temp_setpoint).abs() >= TEMP_DEADBAND {
            let required = capacitance * (action.temp_setpoint - temp) / dt - envelope - gain;
            hvac = required.clamp(-capacity, capacity);
        }
        let next_temp = temp + dt * (envelope + gain + hvac) / capacitance;
        sensible_kj += hvac.abs() * dt;

        let mut next_ratio = ratio + dt * (vent_flow * (out_ratio - ratio) + moisture) / air_mass;
        if capacity > 0.0 {
            let target = humidity_ratio(next_temp, action.humidity_setpoint);
            if next_ratio > target {
                let removed = (next_ratio - target).min(max_removal);
                next_ratio -= removed;
                latent_kj += removed * air_mass * LATENT_HEAT;
            }
        }
        // Moisture beyond saturation condenses: on the coil (billed as latent
        // load) when a plant is installed, otherwise on surfaces.
        let saturated = humidity_ratio(next_temp, 100.0);
        if next_ratio > saturated {
            if capacity > 0.0 {
                latent_kj += (next_ratio - saturated) * air_mass * LATENT_HEAT;
            }
            next_ratio = saturated;
        }
        next_ratio = next_ratio.max(0.0);

        if !next_temp.is_finite() || !next_ratio.is_finite() {
            return Err(EnvError::Diverged);
        }
        temp = next_temp;
        ratio = next_ratio;
    }

    let humidity_change = relative_humidity(temp, ratio) - relative_humidity(t0, ratio0);
    let indoor_humidity = (state.indoor_humidity + humidity_change).clamp(0.0, 100.0);
    let next_slot = state.slot + 1;
    let (next_out_temp, next_out_rh) = weather.weather_at(next_slot, config.slot_minutes)?;
    let energy_kwh = (sensible_kj + latent_kj) / config.cop / 3600.0;
    let next = ThermalState {
        indoor_temp: temp,
        indoor_humidity,
        outdoor_temp: next_out_temp,
        outdoor_humidity: next_out_rh,
        slot: next_slot,
    };
    next.validate().map_err(|_| EnvError::Diverged)?;
    Ok((next, energy_kwh))
}
