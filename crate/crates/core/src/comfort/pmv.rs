//! Fanger Predicted Mean Vote (ISO 7730 heat-balance model).

use super::ComfortError;

/// The six physical inputs of the comfort model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComfortInputs {
    /// Air temperature, °C.
    pub air_temp: f64,
    /// Relative humidity, %.
    pub rel_humidity: f64,
    /// Mean radiant temperature, °C.
    pub mean_radiant_temp: f64,
    /// Relative air speed, m/s.
    pub air_speed: f64,
    /// Metabolic rate, met.
    pub metabolic_rate: f64,
    /// Clothing insulation, clo.
    pub clothing: f64,
}

impl ComfortInputs {
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.air_temp,
            self.rel_humidity,
            self.mean_radiant_temp,
            self.air_speed,
            self.metabolic_rate,
            self.clothing,
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            air_temp: v[0],
            rel_humidity: v[1],
            mean_radiant_temp: v[2],
            air_speed: v[3],
            metabolic_rate: v[4],
            clothing: v[5],
        }
    }

    /// Checks the admissible input box of the oracle.
    pub fn validate(&self) -> Result<(), ComfortError> {
        let checks = [
            ("air_temp", self.air_temp, 0.0, 50.0),
            ("rel_humidity", self.rel_humidity, 0.0, 100.0),
            ("mean_radiant_temp", self.mean_radiant_temp, 0.0, 60.0),
            ("air_speed", self.air_speed, 0.0, 2.0),
            ("metabolic_rate", self.metabolic_rate, 0.5, 4.0),
            ("clothing", self.clothing, 0.0, 2.0),
        ];
        for (name, value, lo, hi) in checks {
            if !value.is_finite() || value < lo || value > hi {
                return Err(ComfortError::OutOfRange { name, value, lo, hi });
            }
        }
        Ok(())
    }
}

pub const PMV_CLAMP: f64 = 3.5;
const MAX_ITERATIONS: usize = 300;
/// Convergence tolerance on the clothing surface temperature, °C.
const TCL_TOLERANCE: f64 = 1e-5;

/// Water vapour partial pressure, Pa.
pub(crate) fn vapour_pressure(air_temp: f64, rel_humidity: f64) -> f64 {
    rel_humidity * 10.0 * (16.6536 - 4030.183 / (air_temp + 235.0)).exp()
}

/// PMV for the given conditions, clamped to `[-3.5, 3.5]`.
pub fn pmv_oracle(inputs: &ComfortInputs) -> Result<f64, ComfortError> {
    inputs.validate()?;
    let ta = inputs.air_temp;
    let tr = inputs.mean_radiant_temp;
    let pa = vapour_pressure(ta, inputs.rel_humidity);
    let icl = 0.155 * inputs.clothing;
    let m = inputs.metabolic_rate * 58.15;
    let mw = m; // no external work
    let fcl = if icl <= 0.078 { 1.0 + 1.29 * icl } else { 1.05 + 0.645 * icl };
    let hcf = 12.1 * inputs.air_speed.sqrt();
    let taa = ta + 273.0;
    let tra = tr + 273.0;

    // Fixed-point iteration on xn = (tcl + 273) / 100 with damping.
    let p1 = icl * fcl;
    let p2 = p1 * 3.96;
    let p3 = p1 * 100.0;
    let p4 = p1 * taa;
    let p5 = 308.7 - 0.028 * mw + p2 * (tra / 100.0).powi(4);
    let tcla = taa + (35.5 - ta) / (3.5 * icl + 0.1);
    let mut xn = tcla / 100.0;
    let mut xf = tcla / 50.0;
    let mut hc = hcf;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        xf = (xf + xn) / 2.0;
        let hcn = 2.38 * (100.0 * xf - taa).abs().powf(0.25);
        hc = hcf.max(hcn);
        xn = (p5 + p4 * hc - p2 * xf.powi(4)) / (100.0 + p3 * hc);
        if 100.0 * (xn - xf).abs() <= TCL_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ComfortError::NoConvergence(MAX_ITERATIONS));
    }
    let tcl = 100.0 * xn - 273.0;

    let hl1 = 3.05e-3 * (5733.0 - 6.99 * mw - pa);
    let hl2 = if mw > 58.15 { 0.42 * (mw - 58.15) } else { 0.0 };
    let hl3 = 1.7e-5 * m * (5867.0 - pa);
    let hl4 = 0.0014 * m * (34.0 - ta);
    let hl5 = 3.96 * fcl * (xn.powi(4) - (tra / 100.0).powi(4));
    let hl6 = fcl * hc * (tcl - ta);
    let ts = 0.303 * (-0.036 * m).exp() + 0.028;
    let pmv = ts * (mw - hl1 - hl2 - hl3 - hl4 - hl5 - hl6);
    Ok(pmv.clamp(-PMV_CLAMP, PMV_CLAMP))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(ta: f64, rh: f64, tr: f64, v: f64, met: f64, clo: f64) -> ComfortInputs {
        ComfortInputs {
            air_temp: ta,
            rel_humidity: rh,
            mean_radiant_temp: tr,
            air_speed: v,
            metabolic_rate: met,
            clothing: clo,
        }
    }

    #[test]
    fn hot_condition_is_hot() {
        assert!(pmv_oracle(&inputs(35.0, 70.0, 35.0, 0.1, 1.2, 0.5)).unwrap() > 2.0);
    }

    #[test]
    fn increasing_in_air_temperature() {
        let mut prev = f64::NEG_INFINITY;
        let mut t = 18.0;
        while t <= 32.0 {
            let p = pmv_oracle(&inputs(t, 50.0, 25.0, 0.1, 1.2, 0.5)).unwrap();
            assert!(p > prev, "not increasing at {t}");
            prev = p;
            t += 0.25;
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            pmv_oracle(&inputs(55.0, 50.0, 25.0, 0.1, 1.2, 0.5)),
            Err(ComfortError::OutOfRange { name: "air_temp", .. })
        ));
        assert!(pmv_oracle(&inputs(25.0, 50.0, 25.0, 0.1, 0.2, 0.5)).is_err());
        assert!(pmv_oracle(&inputs(25.0, f64::NAN, 25.0, 0.1, 1.2, 0.5)).is_err());
    }

    #[test]
    fn output_clamped() {
        let p = pmv_oracle(&inputs(50.0, 100.0, 60.0, 0.0, 4.0, 2.0)).unwrap();
        assert_eq!(p, PMV_CLAMP);
        let c = pmv_oracle(&inputs(0.0, 0.0, 0.0, 2.0, 0.5, 0.0)).unwrap();
        assert_eq!(c, -PMV_CLAMP);
    }
}
