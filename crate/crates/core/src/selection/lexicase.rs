//! Lexicase and semi-dynamic ε-lexicase selection.
//!
//! Cases are visited in a uniformly shuffled order. At each case the pool is
//! reduced to candidates whose error is at most the pool minimum plus that
//! case's ε (zero for plain lexicase). Filtering stops when one candidate
//! remains or the cases run out; remaining ties are broken uniformly.

use rand::{Rng, RngCore};

use super::{mad, ErrorMatrix, Selector, EPS_LEXICASE, LEXICASE};

/// Per-case ε: the MAD of each column over the whole population.
pub fn case_epsilons(em: &ErrorMatrix) -> Vec<f64> {
    (0..em.n_cases())
        .map(|c| mad(&em.column(c)).expect("non-empty population"))
        .collect()
}

/// One selection event. `pool` and `order` are scratch buffers; on return
/// `order[..consumed]` holds the cases that were filtered on.
fn select_event<R: Rng + ?Sized>(
    em: &ErrorMatrix,
    eps: Option<&[f64]>,
    pool: &mut Vec<usize>,
    order: &mut Vec<usize>,
    rng: &mut R,
) -> (usize, usize) {
    let n_cases = em.n_cases();
    pool.clear();
    pool.extend(0..em.n_individuals());
    order.clear();
    order.extend(0..n_cases);

    let mut consumed = 0;
    while consumed < n_cases && pool.len() > 1 {
        let j = rng.random_range(consumed..n_cases);
        order.swap(consumed, j);
        let case = order[consumed];
        consumed += 1;

        let best = pool
            .iter()
            .map(|&i| em.get(i, case))
            .fold(f64::INFINITY, f64::min);
        let limit = best + eps.map_or(0.0, |e| e[case]);
        pool.retain(|&i| em.get(i, case) <= limit);
    }
    let winner = if pool.len() == 1 {
        pool[0]
    } else {
        pool[rng.random_range(0..pool.len())]
    };
    (winner, consumed)
}

/// Standard lexicase: survivors must match the pool minimum exactly.
pub fn lexicase_select<R: Rng + ?Sized>(em: &ErrorMatrix, rng: &mut R) -> usize {
    assert!(em.n_individuals() > 0, "lexicase over an empty population");
    select_event(em, None, &mut Vec::new(), &mut Vec::new(), rng).0
}

/// ε-lexicase with ε recomputed from `em` for this single event.
pub fn epsilon_lexicase_select<R: Rng + ?Sized>(em: &ErrorMatrix, rng: &mut R) -> usize {
    epsilon_lexicase_select_with(em, &case_epsilons(em), rng)
}

/// ε-lexicase with precomputed per-case `eps`.
pub fn epsilon_lexicase_select_with<R: Rng + ?Sized>(
    em: &ErrorMatrix,
    eps: &[f64],
    rng: &mut R,
) -> usize {
    assert!(em.n_individuals() > 0, "lexicase over an empty population");
    assert_eq!(eps.len(), em.n_cases());
    select_event(em, Some(eps), &mut Vec::new(), &mut Vec::new(), rng).0
}

/// The winner and the case prefix that was consumed to pick it.
#[cfg(test)]
pub(crate) fn lexicase_traced<R: Rng + ?Sized>(
    em: &ErrorMatrix,
    eps: Option<&[f64]>,
    rng: &mut R,
) -> (usize, Vec<usize>) {
    let mut order = Vec::new();
    let (w, consumed) = select_event(em, eps, &mut Vec::new(), &mut order, rng);
    order.truncate(consumed);
    (w, order)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Lexicase;

impl Selector for Lexicase {
    fn name(&self) -> &'static str {
        LEXICASE
    }

    fn select(&self, errors: &ErrorMatrix, count: usize, rng: &mut dyn RngCore) -> Vec<usize> {
        assert!(
            errors.n_individuals() > 0,
            "lexicase over an empty population"
        );
        let (mut pool, mut order) = (Vec::new(), Vec::new());
        (0..count)
            .map(|_| select_event(errors, None, &mut pool, &mut order, rng).0)
            .collect()
    }
}

/// Semi-dynamic ε-lexicase. ε is computed once per call over the full
/// population and shared by all `count` selection events.
#[derive(Debug, Clone, Copy, Default)]
pub struct EpsilonLexicase;

impl Selector for EpsilonLexicase {
    fn name(&self) -> &'static str {
        EPS_LEXICASE
    }

    fn select(&self, errors: &ErrorMatrix, count: usize, rng: &mut dyn RngCore) -> Vec<usize> {
        assert!(
            errors.n_individuals() > 0,
            "lexicase over an empty population"
        );
        let eps = case_epsilons(errors);
        let (mut pool, mut order) = (Vec::new(), Vec::new());
        (0..count)
            .map(|_| select_event(errors, Some(&eps), &mut pool, &mut order, rng).0)
            .collect()
    }
}
