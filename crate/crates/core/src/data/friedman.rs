//! Friedman #1–#3 regression benchmarks.

use std::f64::consts::PI;

use rand::Rng;

use super::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};

/// `10 sin(π x1 x2) + 20 (x3 − 0.5)² + 10 x4 + 5 x5`; columns past the fifth are ignored.
pub fn friedman1_target(x: &[f64]) -> f64 {
    10.0 * (PI * x[0] * x[1]).sin() + 20.0 * (x[2] - 0.5).powi(2) + 10.0 * x[3] + 5.0 * x[4]
}

/// `sqrt(x1² + (x2 x3 − 1/(x2 x4))²)`.
pub fn friedman2_target(x: &[f64]) -> f64 {
    let inner = x[1] * x[2] - 1.0 / (x[1] * x[3]);
    (x[0] * x[0] + inner * inner).sqrt()
}

/// `arctan((x2 x3 − 1/(x2 x4)) / x1)`, with x1 = 0 giving ±π/2.
pub fn friedman3_target(x: &[f64]) -> f64 {
    let inner = x[1] * x[2] - 1.0 / (x[1] * x[3]);
    // atan2 agrees with atan(inner / x1) for x1 ≥ 0 and stays defined at x1 = 0.
    inner.atan2(x[0])
}

fn build(name: &str, rows: Vec<Vec<f64>>, target: fn(&[f64]) -> f64) -> Result<Dataset> {
    let y = rows.iter().map(|r| target(r)).collect();
    Dataset::new(name, FeatureMatrix::from_rows(&rows)?, y)
}

/// Friedman #1 with `n_features ≥ 5` uniform inputs; only the first five affect `y`.
pub fn gen_friedman1<R: Rng + ?Sized>(
    n_features: usize,
    n_instances: usize,
    rng: &mut R,
) -> Result<Dataset> {
    if n_features < 5 {
        return Err(Error::Config(format!(
            "friedman1 needs at least 5 features, got {n_features}"
        )));
    }
    let rows = (0..n_instances)
        .map(|_| (0..n_features).map(|_| rng.random::<f64>()).collect())
        .collect();
    build("friedman1", rows, friedman1_target)
}

fn friedman23_inputs<R: Rng + ?Sized>(n_instances: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n_instances)
        .map(|_| {
            vec![
                rng.random_range(0.0..=100.0),
                rng.random_range(40.0 * PI..=560.0 * PI),
                rng.random_range(0.0..=1.0),
                rng.random_range(1.0..=11.0),
            ]
        })
        .collect()
}

pub fn gen_friedman2<R: Rng + ?Sized>(n_instances: usize, rng: &mut R) -> Result<Dataset> {
    build(
        "friedman2",
        friedman23_inputs(n_instances, rng),
        friedman2_target,
    )
}

pub fn gen_friedman3<R: Rng + ?Sized>(n_instances: usize, rng: &mut R) -> Result<Dataset> {
    build(
        "friedman3",
        friedman23_inputs(n_instances, rng),
        friedman3_target,
    )
}
