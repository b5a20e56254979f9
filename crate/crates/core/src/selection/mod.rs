//! Parent selection over a per-case error matrix.
//!
//! Each method implements [`Selector`] and is registered by name in
//! [`selectors`]: `tournament`, `lexicase`, `eps_lexicase`.

mod lexicase;
mod tournament;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::registry::Registry;

pub use lexicase::{
    case_epsilons, epsilon_lexicase_select, epsilon_lexicase_select_with, lexicase_select,
    EpsilonLexicase, Lexicase,
};
pub use tournament::{tournament_select, Tournament};

pub const TOURNAMENT: &str = "tournament";
pub const LEXICASE: &str = "lexicase";
pub const EPS_LEXICASE: &str = "eps_lexicase";

/// Squared errors of each individual (rows) on the active training cases (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMatrix {
    n_individuals: usize,
    case_ids: Vec<usize>,
    errors: Vec<f64>,
}

impl ErrorMatrix {
    /// Row-major `errors` for `n_individuals` rows and `case_ids.len()` columns.
    pub fn new(n_individuals: usize, case_ids: Vec<usize>, errors: Vec<f64>) -> Result<Self> {
        if errors.len() != n_individuals * case_ids.len() {
            return Err(Error::Usage(format!(
                "{} errors for a {n_individuals}×{} matrix",
                errors.len(),
                case_ids.len()
            )));
        }
        if let Some(e) = errors.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::Usage(format!(
                "error entries must be finite and ≥ 0, found {e}"
            )));
        }
        Ok(Self {
            n_individuals,
            case_ids,
            errors,
        })
    }

    /// Matrix over cases `0..width` from equal-length rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Usage("ragged error rows".into()));
        }
        let n = rows.len();
        Self::new(
            n,
            (0..width).collect(),
            rows.into_iter().flatten().collect(),
        )
    }

    pub fn n_individuals(&self) -> usize {
        self.n_individuals
    }

    pub fn n_cases(&self) -> usize {
        self.case_ids.len()
    }

    pub fn case_ids(&self) -> &[usize] {
        &self.case_ids
    }

    #[inline]
    pub fn get(&self, individual: usize, case: usize) -> f64 {
        self.errors[individual * self.case_ids.len() + case]
    }

    pub fn row(&self, individual: usize) -> &[f64] {
        let t = self.case_ids.len();
        &self.errors[individual * t..(individual + 1) * t]
    }

    pub fn column(&self, case: usize) -> Vec<f64> {
        (0..self.n_individuals).map(|i| self.get(i, case)).collect()
    }

    /// Per-individual mean error (the MSE over the active cases).
    pub fn row_means(&self) -> Vec<f64> {
        let t = self.n_cases().max(1) as f64;
        (0..self.n_individuals)
            .map(|i| self.row(i).iter().sum::<f64>() / t)
            .collect()
    }

    /// The same matrix with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> ErrorMatrix {
        ErrorMatrix {
            n_individuals: self.n_individuals,
            case_ids: self.case_ids.clone(),
            errors: self.errors.iter().map(|e| e * factor).collect(),
        }
    }
}

/// A parent-selection method.
pub trait Selector: Send + Sync {
    fn name(&self) -> &'static str;

    /// Chooses `count` parent indices (with repetition) from `errors`.
    fn select(&self, errors: &ErrorMatrix, count: usize, rng: &mut dyn RngCore) -> Vec<usize>;
}

/// Parameters shared by selector factories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionParams {
    pub tournament_size: usize,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self { tournament_size: 7 }
    }
}

fn build_tournament(p: &SelectionParams) -> Result<Box<dyn Selector>> {
    Ok(Box::new(Tournament::new(p.tournament_size)?))
}

fn build_lexicase(_: &SelectionParams) -> Result<Box<dyn Selector>> {
    Ok(Box::new(Lexicase))
}

fn build_eps_lexicase(_: &SelectionParams) -> Result<Box<dyn Selector>> {
    Ok(Box::new(EpsilonLexicase))
}

/// Registry preloaded with the built-in selectors.
pub fn selectors() -> Registry<dyn Selector, SelectionParams> {
    let mut reg = Registry::new("selection method");
    reg.register(TOURNAMENT, build_tournament)
        .register(LEXICASE, build_lexicase)
        .register(EPS_LEXICASE, build_eps_lexicase);
    reg
}

/// Lower median: element `(n − 1) / 2` of the sorted values.
fn lower_median(values: &mut [f64]) -> f64 {
    let k = (values.len() - 1) / 2;
    *values.select_nth_unstable_by(k, f64::total_cmp).1
}

/// Median absolute deviation, using the lower median for even lengths.
pub fn mad(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Usage("MAD of an empty vector".into()));
    }
    let mut v = values.to_vec();
    let med = lower_median(&mut v);
    v.iter_mut().for_each(|x| *x = (*x - med).abs());
    Ok(lower_median(&mut v))
}
