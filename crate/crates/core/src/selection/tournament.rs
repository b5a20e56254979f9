use rand::{Rng, RngCore};

use super::{ErrorMatrix, Selector, TOURNAMENT};
use crate::error::{Error, Result};

/// Best of `n` uniform draws (with replacement) by MSE.
///
/// Ties go to the lowest index among the tied entrants.
pub fn tournament_select<R: Rng + ?Sized>(mse: &[f64], n: usize, rng: &mut R) -> Result<usize> {
    if mse.is_empty() {
        return Err(Error::Usage("tournament over an empty population".into()));
    }
    if n == 0 {
        return Err(Error::Usage("tournament size must be at least 1".into()));
    }
    Ok(run_tournament(mse, n, rng))
}

#[inline]
fn run_tournament<R: Rng + ?Sized>(mse: &[f64], n: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..mse.len());
    for _ in 1..n {
        let i = rng.random_range(0..mse.len());
        if mse[i] < mse[best] || (mse[i] == mse[best] && i < best) {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub struct Tournament {
    size: usize,
}

impl Tournament {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Config("tournament size must be at least 1".into()));
        }
        Ok(Self { size })
    }
}

impl Selector for Tournament {
    fn name(&self) -> &'static str {
        TOURNAMENT
    }

    fn select(&self, errors: &ErrorMatrix, count: usize, rng: &mut dyn RngCore) -> Vec<usize> {
        let mse = errors.row_means();
        assert!(!mse.is_empty(), "tournament over an empty population");
        (0..count)
            .map(|_| run_tournament(&mse, self.size, rng))
            .collect()
    }
}
