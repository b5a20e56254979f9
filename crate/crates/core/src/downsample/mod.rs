//! Per-generation choice of the active training cases.
//!
//! Strategies implement [`Downsampler`] and are registered by name in
//! [`downsamplers`]: `none` (all cases), `random`, and `informed`
//! (farthest-first over case distances estimated from sampled parents).

mod informed;

use rand::seq::index;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::expr::ExprTree;
use crate::registry::Registry;

pub use informed::{
    binarize_solves, case_distance_matrix, farthest_first, informed_downsample, DistanceMatrix,
    DownsampleState, InformedDownsample, InformedStep, SolveMatrix,
};

pub const NONE: &str = "none";
pub const RANDOM: &str = "random";
pub const INFORMED: &str = "informed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DownsampleConfig {
    #[serde(default = "default_strategy")]
    pub strategy: String,
    /// Fraction `d` of training cases active per generation.
    #[serde(default = "default_rate")]
    pub rate: f64,
    /// Fraction `s` of the population sampled to estimate case distances.
    #[serde(default = "default_parent_rate")]
    pub parent_sample_rate: f64,
    /// Generations `k` between distance-matrix refreshes.
    #[serde(default = "default_refresh")]
    pub refresh_interval: usize,
}

fn default_strategy() -> String {
    NONE.into()
}

fn default_rate() -> f64 {
    0.1
}

fn default_parent_rate() -> f64 {
    0.01
}

fn default_refresh() -> usize {
    10
}

impl Default for DownsampleConfig {
    fn default() -> Self {
        Self {
            strategy: default_strategy(),
            rate: default_rate(),
            parent_sample_rate: default_parent_rate(),
            refresh_interval: default_refresh(),
        }
    }
}

impl DownsampleConfig {
    pub fn with_strategy(strategy: &str) -> Self {
        Self {
            strategy: strategy.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::Config(format!(
                "downsample.rate must be in (0, 1], got {}",
                self.rate
            )));
        }
        if !(self.parent_sample_rate > 0.0 && self.parent_sample_rate <= 1.0) {
            return Err(Error::Config(format!(
                "downsample.parent_sample_rate must be in (0, 1], got {}",
                self.parent_sample_rate
            )));
        }
        if self.refresh_interval == 0 {
            return Err(Error::Config(
                "downsample.refresh_interval must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// `max(1, round(d · T))`.
pub fn sample_size(n_cases: usize, rate: f64) -> usize {
    ((rate * n_cases as f64).round() as usize).clamp(1, n_cases.max(1))
}

/// A uniform sample of `sample_size(T, d)` distinct cases, in ascending order.
pub fn random_downsample<R: Rng + ?Sized>(n_cases: usize, rate: f64, rng: &mut R) -> Vec<usize> {
    let mut cases = index::sample(rng, n_cases, sample_size(n_cases, rate)).into_vec();
    cases.sort_unstable();
    cases
}

/// What a strategy sees when choosing cases.
pub struct DownsampleContext<'a> {
    pub generation: usize,
    pub population: &'a [ExprTree],
    pub train: &'a Dataset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Downsample {
    pub cases: Vec<usize>,
    /// Fitness evaluations spent choosing the cases (charged to the budget).
    pub evaluations: u64,
    pub refreshed: bool,
}

pub trait Downsampler: Send {
    fn name(&self) -> &'static str;

    fn choose(&mut self, ctx: &DownsampleContext<'_>, rng: &mut dyn RngCore) -> Result<Downsample>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoDownsample;

impl Downsampler for NoDownsample {
    fn name(&self) -> &'static str {
        NONE
    }

    fn choose(
        &mut self,
        ctx: &DownsampleContext<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<Downsample> {
        Ok(Downsample {
            cases: (0..ctx.train.len()).collect(),
            evaluations: 0,
            refreshed: false,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RandomDownsample {
    pub rate: f64,
}

impl Downsampler for RandomDownsample {
    fn name(&self) -> &'static str {
        RANDOM
    }

    fn choose(&mut self, ctx: &DownsampleContext<'_>, rng: &mut dyn RngCore) -> Result<Downsample> {
        Ok(Downsample {
            cases: random_downsample(ctx.train.len(), self.rate, rng),
            evaluations: 0,
            refreshed: false,
        })
    }
}

fn build_none(_: &DownsampleConfig) -> Result<Box<dyn Downsampler>> {
    Ok(Box::new(NoDownsample))
}

fn build_random(cfg: &DownsampleConfig) -> Result<Box<dyn Downsampler>> {
    cfg.validate()?;
    Ok(Box::new(RandomDownsample { rate: cfg.rate }))
}

fn build_informed(cfg: &DownsampleConfig) -> Result<Box<dyn Downsampler>> {
    cfg.validate()?;
    Ok(Box::new(InformedDownsample::new(cfg.clone())))
}

/// Registry preloaded with the built-in strategies.
pub fn downsamplers() -> Registry<dyn Downsampler, DownsampleConfig> {
    let mut reg = Registry::new("downsample strategy");
    reg.register(NONE, build_none)
        .register(RANDOM, build_random)
        .register(INFORMED, build_informed);
    reg
}
