use super::EnvError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardConfig {
    /// Weight of energy cost.
    pub beta: f64,
    /// Comfort threshold: half-width of the penalty-free band.
    pub threshold: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            beta: 0.05,
            threshold: 0.5,
        }
    }
}

impl RewardConfig {
    pub fn new(beta: f64, threshold: f64) -> Result<Self, EnvError> {
        let rc = Self { beta, threshold };
        rc.validate()?;
        Ok(rc)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        for (name, v) in [("beta", self.beta), ("threshold", self.threshold)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(EnvError::InvalidConfig(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Comfort penalty: zero on `[-D, D]`, linear distance to the band outside it.
pub fn comfort_penalty(comfort: f64, threshold: f64) -> f64 {
    if comfort > threshold {
        comfort - threshold
    } else if comfort < -threshold {
        -threshold - comfort
    } else {
        0.0
    }
}

pub fn reward(comfort: f64, energy_kwh: f64, rc: &RewardConfig) -> f64 {
    -rc.beta * energy_kwh - comfort_penalty(comfort, rc.threshold)
}
