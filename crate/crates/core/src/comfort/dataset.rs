use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::pmv::{pmv_oracle, ComfortInputs};
use super::ComfortError;

pub const DATASET_HEADER: &str = "air_temp,rel_humidity,mean_radiant_temp,air_speed,met,clo,vote";
pub const VOTE_LIMIT: f64 = 3.0;

/// One labelled comfort observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComfortSample {
    pub air_temp: f64,
    pub rel_humidity: f64,
    pub mean_radiant_temp: f64,
    pub air_speed: f64,
    #[serde(rename = "met")]
    pub metabolic_rate: f64,
    #[serde(rename = "clo")]
    pub clothing: f64,
    pub vote: f64,
}

impl ComfortSample {
    pub fn inputs(&self) -> ComfortInputs {
        ComfortInputs {
            air_temp: self.air_temp,
            rel_humidity: self.rel_humidity,
            mean_radiant_temp: self.mean_radiant_temp,
            air_speed: self.air_speed,
            metabolic_rate: self.metabolic_rate,
            clothing: self.clothing,
        }
    }

    pub fn features(&self) -> [f64; 6] {
        self.inputs().to_array()
    }

    pub fn validate(&self) -> Result<(), String> {
        let all = [
            self.air_temp,
            self.rel_humidity,
            self.mean_radiant_temp,
            self.air_speed,
            self.metabolic_rate,
            self.clothing,
            self.vote,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err("non-finite field".into());
        }
        if !(0.0..=100.0).contains(&self.rel_humidity) {
            return Err(format!("rel_humidity {} outside [0, 100]", self.rel_humidity));
        }
        if self.air_speed < 0.0 {
            return Err(format!("negative air_speed {}", self.air_speed));
        }
        if self.metabolic_rate <= 0.0 {
            return Err(format!("non-positive met {}", self.metabolic_rate));
        }
        if self.clothing < 0.0 {
            return Err(format!("negative clo {}", self.clothing));
        }
        if !(-VOTE_LIMIT..=VOTE_LIMIT).contains(&self.vote) {
            return Err(format!("vote {} outside [-3, 3]", self.vote));
        }
        Ok(())
    }
}

/// Box from which synthetic conditions are drawn uniformly.
///
/// Mean radiant temperature is drawn as air temperature plus an offset.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub air_temp: (f64, f64),
    pub rel_humidity: (f64, f64),
    pub radiant_offset: (f64, f64),
    pub air_speed: (f64, f64),
    pub metabolic_rate: (f64, f64),
    pub clothing: (f64, f64),
    pub count: usize,
}

impl Default for GridSpec {
    /// Indoor conditions around sedentary office activity.
    fn default() -> Self {
        Self {
            air_temp: (16.0, 34.0),
            rel_humidity: (20.0, 100.0),
            radiant_offset: (-2.0, 2.0),
            air_speed: (0.05, 0.4),
            metabolic_rate: (1.0, 1.4),
            clothing: (0.3, 0.8),
            count: 2000,
        }
    }
}

fn draw<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Samples conditions from `grid` and labels them with the PMV oracle plus
/// Gaussian vote noise, clamped to `[-3, 3]`.
pub fn generate_dataset(grid: &GridSpec, noise_sigma: f64, seed: u64) -> Result<Vec<ComfortSample>, ComfortError> {
    if grid.count == 0 {
        return Err(ComfortError::EmptyGrid);
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(ComfortError::InvalidParameter(format!("noise sigma {noise_sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma).expect("sigma checked above");
    let mut out = Vec::with_capacity(grid.count);
    for _ in 0..grid.count {
        let air_temp = draw(&mut rng, grid.air_temp);
        let inputs = ComfortInputs {
            air_temp,
            rel_humidity: draw(&mut rng, grid.rel_humidity),
            mean_radiant_temp: air_temp + draw(&mut rng, grid.radiant_offset),
            air_speed: draw(&mut rng, grid.air_speed),
            metabolic_rate: draw(&mut rng, grid.metabolic_rate),
            clothing: draw(&mut rng, grid.clothing),
        };
        let pmv = pmv_oracle(&inputs)?;
        let eps = noise.sample(&mut rng);
        let vote = if noise_sigma == 0.0 { pmv } else { pmv + eps };
        out.push(ComfortSample {
            air_temp: inputs.air_temp,
            rel_humidity: inputs.rel_humidity,
            mean_radiant_temp: inputs.mean_radiant_temp,
            air_speed: inputs.air_speed,
            metabolic_rate: inputs.metabolic_rate,
            clothing: inputs.clothing,
            vote: vote.clamp(-VOTE_LIMIT, VOTE_LIMIT),
        });
    }
    Ok(out)
}

/// Writes samples with the canonical header. Floats use shortest round-trip
/// formatting so that reloading is exact.
pub fn save_dataset(path: &Path, samples: &[ComfortSample]) -> Result<(), ComfortError> {
    let mut f = std::io::BufWriter::new(File::create(path)?);
    writeln!(f, "{DATASET_HEADER}")?;
    for s in samples {
        writeln!(
            f,
            "{},{},{},{},{},{},{}",
            s.air_temp, s.rel_humidity, s.mean_radiant_temp, s.air_speed, s.metabolic_rate, s.clothing, s.vote
        )?;
    }
    f.flush()?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<Vec<ComfortSample>, ComfortError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => ComfortError::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{}: {e}", path.display()),
            )),
            _ => ComfortError::Malformed { line: 1, reason: e.to_string() },
        })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| ComfortError::Malformed { line: 1, reason: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != DATASET_HEADER {
        return Err(ComfortError::Malformed {
            line: 1,
            reason: format!("expected header `{DATASET_HEADER}`"),
        });
    }
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<ComfortSample>().enumerate() {
        let line = i + 2;
        let sample = row.map_err(|e| ComfortError::Malformed { line, reason: e.to_string() })?;
        sample
            .validate()
            .map_err(|reason| ComfortError::Malformed { line, reason })?;
        out.push(sample);
    }
    Ok(out)
}
