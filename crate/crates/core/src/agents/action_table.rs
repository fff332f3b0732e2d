use super::AgentError;
use crate::envsim::ControlAction;

const LEVEL_EPS: f64 = 1e-9;

/// Evenly spaced set-point levels over an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    /// Whether `hi` itself is a level when it falls on the grid.
    pub inclusive: bool,
}

impl LevelRange {
    pub fn half_open(lo: f64, hi: f64, step: f64) -> Self {
        Self { lo, hi, step, inclusive: false }
    }

    pub fn closed(lo: f64, hi: f64, step: f64) -> Self {
        Self { lo, hi, step, inclusive: true }
    }

    pub fn levels(&self) -> Result<Vec<f64>, AgentError> {
        let span = self.hi - self.lo;
        if !(self.step > 0.0 && self.step.is_finite() && span.is_finite()) || self.step > span {
            return Err(AgentError::InvalidConfig(format!(
                "step {} invalid for range [{}, {}]",
                self.step, self.lo, self.hi
            )));
        }
        let ratio = span / self.step;
        let count = if self.inclusive {
            (ratio + LEVEL_EPS).floor() as usize + 1
        } else {
            (ratio - LEVEL_EPS).ceil() as usize
        };
        Ok((0..count).map(|k| self.lo + k as f64 * self.step).collect())
    }
}

/// Cross product of temperature and humidity levels, temperature-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteActionTable {
    temps: Vec<f64>,
    humidities: Vec<f64>,
}

pub fn build_action_table(temp: LevelRange, humidity: LevelRange) -> Result<DiscreteActionTable, AgentError> {
    let temps = temp.levels()?;
    let humidities = humidity.levels()?;
    for &t in &temps {
        for &h in [humidities[0], *humidities.last().unwrap()].iter() {
            ControlAction::new(t, h).map_err(|e| AgentError::InvalidConfig(e.to_string()))?;
        }
    }
    Ok(DiscreteActionTable { temps, humidities })
}

impl DiscreteActionTable {
    /// 1 °C by 5 % grid used by the discrete baselines.
    pub fn baseline() -> Self {
        build_action_table(LevelRange::half_open(15.0, 35.0, 1.0), LevelRange::closed(0.0, 100.0, 5.0))
            .expect("baseline grid is valid")
    }

    pub fn len(&self) -> usize {
        self.temps.len() * self.humidities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn temp_levels(&self) -> &[f64] {
        &self.temps
    }

    pub fn humidity_levels(&self) -> &[f64] {
        &self.humidities
    }

    pub fn action(&self, index: usize) -> ControlAction {
        let n_h = self.humidities.len();
        ControlAction::clipped(self.temps[index / n_h], self.humidities[index % n_h])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn humidity_levels_closed_range() {
        assert_eq!(LevelRange::closed(0.0, 100.0, 1.0).levels().unwrap().len(), 101);
    }

    #[test]
    fn degenerate_temperature_range() {
        let levels = LevelRange::half_open(15.0, 35.0, 20.0).levels().unwrap();
        assert_eq!(levels, vec![15.0]);
    }

    #[test]
    fn step_larger_than_span() {
        assert!(LevelRange::half_open(15.0, 35.0, 21.0).levels().is_err());
        assert!(LevelRange::closed(0.0, 100.0, 0.0).levels().is_err());
    }

    #[test]
    fn ordering_is_temperature_major() {
        let t = build_action_table(LevelRange::half_open(15.0, 17.0, 1.0), LevelRange::closed(0.0, 10.0, 5.0)).unwrap();
        let got: Vec<(f64, f64)> = (0..t.len())
            .map(|i| (t.action(i).temp_setpoint(), t.action(i).humidity_setpoint()))
            .collect();
        assert_eq!(got, vec![(15.0, 0.0), (15.0, 5.0), (15.0, 10.0), (16.0, 0.0), (16.0, 5.0), (16.0, 10.0)]);
    }

    #[test]
    fn baseline_size() {
        assert_eq!(DiscreteActionTable::baseline().len(), 20 * 21);
    }
}
