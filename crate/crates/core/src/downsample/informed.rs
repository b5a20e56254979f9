//! Informed down-sampling.
//!
//! A few parents are evaluated on every training case; each case becomes the
//! binary vector of which parents "solve" it (error within the case minimum
//! plus its MAD). Cases whose solve vectors differ are far apart, and the
//! active subset is picked by farthest-first traversal over those distances.

use rand::seq::index;
use rand::{Rng, RngCore};

use super::{sample_size, Downsample, DownsampleConfig, DownsampleContext, Downsampler, INFORMED};
use crate::data::Dataset;
use crate::engine::evaluate_population;
use crate::error::{Error, Result};
use crate::expr::ExprTree;
use crate::selection::{case_epsilons, ErrorMatrix};

/// Row-major bits: parent `i` solves case `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveMatrix {
    n_rows: usize,
    n_cases: usize,
    bits: Vec<bool>,
}

impl SolveMatrix {
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let n_cases = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cases), "ragged solve rows");
        Self {
            n_rows: rows.len(),
            n_cases,
            bits: rows.concat(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cases(&self) -> usize {
        self.n_cases
    }

    pub fn get(&self, row: usize, case: usize) -> bool {
        self.bits[row * self.n_cases + case]
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.bits[row * self.n_cases..(row + 1) * self.n_cases]
    }
}

/// Bit `(i, c)` is set iff `errors(i, c) ≤ min_i errors(i, c) + eps[c]`.
pub fn binarize_solves(errors: &ErrorMatrix, eps: &[f64]) -> SolveMatrix {
    assert_eq!(eps.len(), errors.n_cases());
    let mins: Vec<f64> = (0..errors.n_cases())
        .map(|c| errors.column(c).into_iter().fold(f64::INFINITY, f64::min))
        .collect();
    let bits = (0..errors.n_individuals())
        .flat_map(|i| (0..errors.n_cases()).map(move |c| (i, c)))
        .map(|(i, c)| errors.get(i, c) <= mins[c] + eps[c])
        .collect();
    SolveMatrix {
        n_rows: errors.n_individuals(),
        n_cases: errors.n_cases(),
        bits,
    }
}

/// Symmetric case-by-case distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "distance matrix must be square"
        );
        Self {
            n,
            d: rows.concat(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.d[a * self.n + b]
    }
}

/// Hamming distance between solve columns, divided by the number of parents.
pub fn case_distance_matrix(solves: &SolveMatrix) -> DistanceMatrix {
    let (p, t) = (solves.n_rows(), solves.n_cases());
    assert!(p >= 1, "need at least one parent");
    let mut d = vec![0.0; t * t];
    for a in 0..t {
        for b in (a + 1)..t {
            let diff = (0..p)
                .filter(|&i| solves.get(i, a) != solves.get(i, b))
                .count();
            let v = diff as f64 / p as f64;
            d[a * t + b] = v;
            d[b * t + a] = v;
        }
    }
    DistanceMatrix { n: t, d }
}

/// Greedy max-min traversal: a uniformly random first case, then repeatedly
/// the case farthest from everything chosen so far (ties uniformly at random).
pub fn farthest_first<R: Rng + ?Sized>(
    dist: &DistanceMatrix,
    size: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let t = dist.len();
    if size == 0 || size > t {
        return Err(Error::Usage(format!(
            "farthest_first size {size} outside 1..={t}"
        )));
    }
    let first = rng.random_range(0..t);
    let mut chosen = vec![first];
    let mut taken = vec![false; t];
    taken[first] = true;
    // Distance from each case to its nearest chosen case.
    let mut nearest: Vec<f64> = (0..t).map(|c| dist.get(first, c)).collect();
    let mut ties = Vec::with_capacity(t);
    while chosen.len() < size {
        let far = (0..t)
            .filter(|&c| !taken[c])
            .map(|c| nearest[c])
            .fold(f64::NEG_INFINITY, f64::max);
        ties.clear();
        ties.extend((0..t).filter(|&c| !taken[c] && nearest[c] == far));
        let next = ties[rng.random_range(0..ties.len())];
        taken[next] = true;
        chosen.push(next);
        for (c, n) in nearest.iter_mut().enumerate() {
            *n = n.min(dist.get(next, c));
        }
    }
    Ok(chosen)
}

/// Distance matrix and the generation it was last rebuilt.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DownsampleState {
    pub case_distance: Option<DistanceMatrix>,
    pub last_refresh_gen: usize,
}

/// Result of one informed down-sampling step.
#[derive(Debug, Clone, PartialEq)]
pub struct InformedStep {
    pub cases: Vec<usize>,
    pub refresh_evaluations: u64,
    pub refreshed: bool,
}

/// Rebuilds the distance matrix when due (`gen % k == 0` or none yet), then
/// picks `sample_size(T, d)` cases by farthest-first traversal.
pub fn informed_downsample<R: Rng + ?Sized>(
    state: &mut DownsampleState,
    gen: usize,
    population: &[ExprTree],
    train: &Dataset,
    cfg: &DownsampleConfig,
    rng: &mut R,
) -> Result<InformedStep> {
    if population.is_empty() {
        return Err(Error::Usage(
            "informed down-sampling needs a population".into(),
        ));
    }
    let mut refresh_evaluations = 0;
    let refreshed = state.case_distance.is_none() || gen.is_multiple_of(cfg.refresh_interval);
    if refreshed {
        let n_parents = sample_size(population.len(), cfg.parent_sample_rate);
        let parents: Vec<ExprTree> = index::sample(rng, population.len(), n_parents)
            .into_iter()
            .map(|i| population[i].clone())
            .collect();
        let errors = evaluate_population(&parents, train)?;
        refresh_evaluations = (n_parents * train.len()) as u64;
        let solves = binarize_solves(&errors, &case_epsilons(&errors));
        state.case_distance = Some(case_distance_matrix(&solves));
        state.last_refresh_gen = gen;
    }
    let dist = state
        .case_distance
        .as_ref()
        .expect("distance matrix present");
    let cases = farthest_first(dist, sample_size(train.len(), cfg.rate), rng)?;
    Ok(InformedStep {
        cases,
        refresh_evaluations,
        refreshed,
    })
}

#[derive(Debug, Clone)]
pub struct InformedDownsample {
    cfg: DownsampleConfig,
    state: DownsampleState,
}

impl InformedDownsample {
    pub fn new(cfg: DownsampleConfig) -> Self {
        Self {
            cfg,
            state: DownsampleState::default(),
        }
    }

    pub fn state(&self) -> &DownsampleState {
        &self.state
    }
}

impl Downsampler for InformedDownsample {
    fn name(&self) -> &'static str {
        INFORMED
    }

    fn choose(&mut self, ctx: &DownsampleContext<'_>, rng: &mut dyn RngCore) -> Result<Downsample> {
        let step = informed_downsample(
            &mut self.state,
            ctx.generation,
            ctx.population,
            ctx.train,
            &self.cfg,
            rng,
        )?;
        Ok(Downsample {
            cases: step.cases,
            evaluations: step.refresh_evaluations,
            refreshed: step.refreshed,
        })
    }
}
