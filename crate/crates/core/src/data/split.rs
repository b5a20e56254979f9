//! Train/test partitioning with train-only noise.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Dataset, NoiseSpec};

pub const TRAIN_FRACTION: f64 = 0.7;

/// `round(frac · n)` with halves rounded up, kept within `1..n` for `n ≥ 2`.
pub fn train_count(n: usize, frac: f64) -> usize {
    // The epsilon absorbs representation error such as 0.7 · 5 = 3.4999….
    let raw = (frac * n as f64 + 0.5 + 1e-9).floor() as usize;
    if n < 2 {
        raw.min(n)
    } else {
        raw.clamp(1, n - 1)
    }
}

/// Partition indices as `(train, test)`.
pub fn train_test_split<R: Rng + ?Sized>(
    n: usize,
    frac: f64,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let test = idx.split_off(train_count(n, frac));
    (idx, test)
}

/// A dataset split into a (possibly noisy) training part and a clean test part.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: Dataset,
    /// Noise-free training targets, kept for reference.
    pub train_clean_y: Vec<f64>,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub noise_level: f64,
}

impl SplitDataset {
    pub fn new<R: Rng + ?Sized, N: Rng + ?Sized>(
        ds: &Dataset,
        train_frac: f64,
        noise: NoiseSpec,
        split_rng: &mut R,
        noise_rng: &mut N,
    ) -> Self {
        let (train_indices, test_indices) = train_test_split(ds.len(), train_frac, split_rng);
        let mut train = ds.subset(&train_indices);
        let test = ds.subset(&test_indices);
        let train_clean_y = train.y.clone();
        train.y = noise.apply(&train_clean_y, noise_rng);
        Self {
            train,
            train_clean_y,
            test,
            train_indices,
            test_indices,
            noise_level: noise.level,
        }
    }
}
