use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::AgentError;

/// Value that moves linearly from `initial` to `last` over `episodes` episodes
/// and stays at `last` afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSchedule {
    pub initial: f64,
    pub last: f64,
    pub episodes: usize,
}

impl LinearSchedule {
    pub fn value(&self, episode: usize) -> f64 {
        if self.episodes < 2 || episode + 1 >= self.episodes {
            return self.last;
        }
        let frac = episode as f64 / (self.episodes - 1) as f64;
        self.initial + frac * (self.last - self.initial)
    }
}

/// Ornstein-Uhlenbeck exploration noise, one independent process per action dimension.
#[derive(Debug, Clone)]
pub struct OuNoise {
    state: Vec<f64>,
    pub theta: f64,
    pub sigma: f64,
    pub mu: f64,
    scale: f64,
    rng: ChaCha8Rng,
}

impl OuNoise {
    pub fn new(dim: usize, theta: f64, sigma: f64, mu: f64, seed: u64) -> Result<Self, AgentError> {
        if !(theta > 0.0 && theta.is_finite()) || !(sigma >= 0.0 && sigma.is_finite()) || !mu.is_finite() {
            return Err(AgentError::InvalidConfig(format!("OU theta {theta}, sigma {sigma}, mu {mu}")));
        }
        Ok(Self {
            state: vec![mu; dim],
            theta,
            sigma,
            mu,
            scale: 1.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn set_state(&mut self, x: &[f64]) {
        self.state.copy_from_slice(x);
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn set_scale(&mut self, scale: f64) {
        self.scale = scale.max(0.0);
    }

    /// Puts every dimension back at the long-run mean.
    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|x| *x = self.mu);
    }

    pub fn sample(&mut self, dt: f64) -> Vec<f64> {
        let sd = self.sigma * dt.sqrt();
        for x in self.state.iter_mut() {
            let xi: f64 = StandardNormal.sample(&mut self.rng);
            *x += self.theta * (self.mu - *x) * dt + sd * xi;
        }
        self.state.iter().map(|x| self.scale * x).collect()
    }
}
