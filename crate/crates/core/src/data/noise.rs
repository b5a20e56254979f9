//! Additive Gaussian target noise.

use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Noise level γ and how it maps to a standard deviation.
///
/// The noise standard deviation is `γ · σ(y_clean)` with σ the population
/// standard deviation of the clean targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub level: f64,
}

impl NoiseSpec {
    pub fn new(level: f64) -> Self {
        assert!(
            level >= 0.0 && level.is_finite(),
            "noise level must be finite and ≥ 0"
        );
        Self { level }
    }

    pub fn sigma(&self, y_clean: &[f64]) -> f64 {
        self.level * population_std(y_clean)
    }

    pub fn apply<R: Rng + ?Sized>(&self, y_clean: &[f64], rng: &mut R) -> Vec<f64> {
        let sigma = self.sigma(y_clean);
        if sigma == 0.0 {
            return y_clean.to_vec();
        }
        let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
        y_clean.iter().map(|y| y + normal.sample(rng)).collect()
    }
}

pub fn population_std(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// `y + N(0, γ·σ(y))` elementwise.
pub fn add_noise<R: Rng + ?Sized>(y_clean: &[f64], level: f64, rng: &mut R) -> Vec<f64> {
    NoiseSpec::new(level).apply(y_clean, rng)
}
