//! Run measurements: MSE, generalization gap, error diversity, tree size,
//! and trailing moving averages for plotting.

use std::collections::HashSet;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::ExprTree;
use crate::selection::ErrorMatrix;

/// Upper bound on a single squared error, so sums over cases stay finite.
pub const SQUARED_ERROR_CAP: f64 = 1e300;

#[inline]
pub fn squared_error(pred: f64, y: f64) -> f64 {
    let d = pred - y;
    (d * d).min(SQUARED_ERROR_CAP)
}

/// Mean squared error; each term is capped at [`SQUARED_ERROR_CAP`].
pub fn mse(pred: &[f64], y: &[f64]) -> Result<f64> {
    if pred.len() != y.len() || pred.is_empty() {
        return Err(Error::Usage(format!(
            "mse needs equal non-empty lengths, got {} and {}",
            pred.len(),
            y.len()
        )));
    }
    Ok(pred
        .iter()
        .zip(y)
        .map(|(&p, &t)| squared_error(p, t))
        .sum::<f64>()
        / pred.len() as f64)
}

/// Fraction of distinct error vectors (exact equality) in the population.
pub fn error_diversity(em: &ErrorMatrix) -> f64 {
    error_diversity_rounded(em, None)
}

/// As [`error_diversity`], optionally rounding errors to `decimals` places first.
pub fn error_diversity_rounded(em: &ErrorMatrix, decimals: Option<i32>) -> f64 {
    let n = em.n_individuals();
    if n == 0 {
        return 0.0;
    }
    let scale = decimals.map(|d| 10f64.powi(d));
    let distinct: HashSet<Vec<u64>> = (0..n)
        .map(|i| {
            em.row(i)
                .iter()
                .map(|&e| match scale {
                    Some(s) => ((e * s).round() / s).to_bits(),
                    None => e.to_bits(),
                })
                .collect()
        })
        .collect();
    distinct.len() as f64 / n as f64
}

/// Median with the mean of the middle two for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Median node count of the population.
pub fn median_size(pop: &[ExprTree]) -> f64 {
    let sizes: Vec<f64> = pop.iter().map(|t| t.size() as f64).collect();
    median(&sizes)
}

/// Trailing mean over the last `min(window, i + 1)` points.
///
/// Each window is averaged as offsets from its first point, so a constant
/// stretch comes out exactly constant.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    (0..series.len())
        .map(|i| {
            let w = &series[(i + 1).saturating_sub(window)..=i];
            let base = w[0];
            base + w.iter().map(|v| v - base).sum::<f64>() / w.len() as f64
        })
        .collect()
}

/// Wall-clock time spent in each phase of the loop.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub downsample: Duration,
    pub evaluation: Duration,
    pub selection: Duration,
    pub variation: Duration,
    /// Full-training-set evaluation for best tracking; not part of the budget.
    pub logging: Duration,
}

impl std::ops::AddAssign for PhaseTimes {
    fn add_assign(&mut self, o: Self) {
        self.downsample += o.downsample;
        self.evaluation += o.evaluation;
        self.selection += o.selection;
        self.variation += o.variation;
        self.logging += o.logging;
    }
}

/// Per-generation measurements. Field names are the results CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub gen: usize,
    pub best_train_mse: f64,
    pub best_test_mse: f64,
    pub generalization_gap: f64,
    pub error_diversity: f64,
    pub median_tree_size: f64,
    pub evaluations_cumulative: u64,
    #[serde(skip)]
    pub phase_times: PhaseTimes,
}

impl GenerationRecord {
    pub const CSV_COLUMNS: [&'static str; 7] = [
        "gen",
        "best_train_mse",
        "best_test_mse",
        "generalization_gap",
        "error_diversity",
        "median_tree_size",
        "evaluations_cumulative",
    ];
}
