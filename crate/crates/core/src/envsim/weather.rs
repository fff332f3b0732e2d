use std::f64::consts::PI;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::EnvError;

pub const WEATHER_HEADER: &str = "hour,temp_c,rh_pct";

/// Hourly outdoor observations, linearly interpolated between hours.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    hours: Vec<f64>,
    temp: Vec<f64>,
    rh: Vec<f64>,
}

impl WeatherSeries {
    pub fn new(hours: Vec<f64>, temp: Vec<f64>, rh: Vec<f64>) -> Result<Self, EnvError> {
        if hours.is_empty() || hours.len() != temp.len() || hours.len() != rh.len() {
            return Err(EnvError::Weather("series columns must be non-empty and equal length".into()));
        }
        for (i, w) in hours.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(EnvError::WeatherRow {
                    line: i + 3,
                    reason: format!("hour {} not after {}", w[1], w[0]),
                });
            }
        }
        for (i, (&t, &h)) in temp.iter().zip(&rh).enumerate() {
            if !t.is_finite() || !h.is_finite() || !(0.0..=100.0).contains(&h) {
                return Err(EnvError::WeatherRow {
                    line: i + 2,
                    reason: format!("temp {t} / rh {h} invalid"),
                });
            }
        }
        Ok(Self { hours, temp, rh })
    }

    pub fn hours(&self) -> &[f64] {
        &self.hours
    }

    pub fn at_hour(&self, hour: f64) -> Result<(f64, f64), EnvError> {
        let first = self.hours[0];
        let last = *self.hours.last().unwrap();
        if !(hour >= first && hour <= last) {
            return Err(EnvError::BeyondSeries { hour, first, last });
        }
        let idx = self.hours.partition_point(|&h| h <= hour);
        // idx >= 1 because hours[0] <= hour
        let i = idx - 1;
        if self.hours[i] == hour || i + 1 == self.hours.len() {
            return Ok((self.temp[i], self.rh[i]));
        }
        let frac = (hour - self.hours[i]) / (self.hours[i + 1] - self.hours[i]);
        let lerp = |a: f64, b: f64| a + frac * (b - a);
        Ok((lerp(self.temp[i], self.temp[i + 1]), lerp(self.rh[i], self.rh[i + 1])))
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), EnvError> {
        let mut out = format!("{WEATHER_HEADER}\n");
        for i in 0..self.hours.len() {
            out.push_str(&format!("{},{},{}\n", self.hours[i], self.temp[i], self.rh[i]));
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Diurnal sinusoid with daily and hourly Gaussian perturbations.
///
/// Noise draws are a pure function of `(seed, day or hour index)`, so the
/// source can be queried at any time in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticWeather {
    pub temp_mean: f64,
    pub temp_amplitude: f64,
    pub rh_mean: f64,
    pub rh_amplitude: f64,
    /// Hour of day with peak temperature (humidity peaks 12 h later).
    pub peak_hour: f64,
    pub period_hours: f64,
    /// Hourly temperature noise, °C; humidity noise uses three times this in %.
    pub noise_sigma: f64,
    /// Day-to-day offset of the temperature mean, °C.
    pub daily_sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticWeather {
    /// Hot and humid tropical climate.
    fn default() -> Self {
        Self {
            temp_mean: 28.0,
            temp_amplitude: 3.0,
            rh_mean: 78.0,
            rh_amplitude: 12.0,
            peak_hour: 15.0,
            period_hours: 24.0,
            noise_sigma: 0.4,
            daily_sigma: 1.0,
            seed: 0,
        }
    }
}

impl SyntheticWeather {
    pub fn constant(temp: f64, rh: f64) -> Self {
        Self {
            temp_mean: temp,
            temp_amplitude: 0.0,
            rh_mean: rh,
            rh_amplitude: 0.0,
            noise_sigma: 0.0,
            daily_sigma: 0.0,
            ..Self::default()
        }
    }

    fn normal(&self, stream: u64, index: i64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        rng.set_stream(stream);
        StandardNormal.sample(&mut rng)
    }

    fn hourly_noise(&self, stream: u64, hour: f64) -> f64 {
        let h0 = hour.floor();
        let frac = hour - h0;
        let a = self.normal(stream, h0 as i64);
        if frac == 0.0 {
            return a;
        }
        let b = self.normal(stream, h0 as i64 + 1);
        a + frac * (b - a)
    }

    pub fn at_hour(&self, hour: f64) -> (f64, f64) {
        let phase = 2.0 * PI * (hour - self.peak_hour) / self.period_hours;
        let mut temp = self.temp_mean + self.temp_amplitude * phase.cos();
        let mut rh = self.rh_mean - self.rh_amplitude * phase.cos();
        if self.daily_sigma > 0.0 {
            let day = (hour / 24.0).floor() as i64;
            let offset = self.daily_sigma * self.normal(1, day);
            temp += offset;
            rh -= 2.0 * offset;
        }
        if self.noise_sigma > 0.0 {
            temp += self.noise_sigma * self.hourly_noise(2, hour);
            rh += 3.0 * self.noise_sigma * self.hourly_noise(3, hour);
        }
        (temp, rh.clamp(0.0, 100.0))
    }

    /// Samples the source at whole hours `0..hours` as a series.
    pub fn to_series(&self, hours: usize) -> WeatherSeries {
        let hs: Vec<f64> = (0..hours).map(|h| h as f64).collect();
        let (t, r): (Vec<f64>, Vec<f64>) = hs.iter().map(|&h| self.at_hour(h)).unzip();
        WeatherSeries::new(hs, t, r).expect("synthetic weather is always valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeatherSource {
    Series(WeatherSeries),
    Synthetic(SyntheticWeather),
}

impl WeatherSource {
    /// Outdoor (temperature °C, relative humidity %) at the start of `slot`.
    pub fn weather_at(&self, slot: u64, slot_minutes: f64) -> Result<(f64, f64), EnvError> {
        let hour = slot as f64 * slot_minutes / 60.0;
        match self {
            WeatherSource::Series(s) => s.at_hour(hour),
            WeatherSource::Synthetic(s) => Ok(s.at_hour(hour)),
        }
    }
}

pub fn load_weather_csv(path: &Path) -> Result<WeatherSource, EnvError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| EnvError::Weather(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| EnvError::Weather(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != WEATHER_HEADER {
        return Err(EnvError::WeatherRow {
            line: 1,
            reason: format!("expected header `{WEATHER_HEADER}`"),
        });
    }
    let (mut hours, mut temp, mut rh) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in reader.deserialize::<(f64, f64, f64)>().enumerate() {
        let line = i + 2;
        let (h, t, r) = rec.map_err(|e| EnvError::WeatherRow { line, reason: e.to_string() })?;
        if !(0.0..=100.0).contains(&r) {
            return Err(EnvError::WeatherRow {
                line,
                reason: format!("rh {r} outside [0, 100]"),
            });
        }
        if let Some(&prev) = hours.last() {
            if !(h > prev) {
                return Err(EnvError::WeatherRow {
                    line,
                    reason: format!("hour {h} not after {prev}"),
                });
            }
        }
        hours.push(h);
        temp.push(t);
        rh.push(r);
    }
    Ok(WeatherSource::Series(WeatherSeries::new(hours, temp, rh)?))
}
