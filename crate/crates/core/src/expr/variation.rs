//! Subtree crossover and subtree mutation with a static depth limit.

use rand::Rng;

use super::init::random_tree;
use super::{ExprTree, InitMethod, PrimitiveSet};

/// Depth bounds of the subtree grown by [`subtree_mutation`].
pub const MUTATION_DEPTH: (usize, usize) = (0, 2);

/// Swaps uniformly chosen subtrees of `a` and `b`.
///
/// A child deeper than `max_depth` is replaced by its own parent.
pub fn subtree_crossover<R: Rng + ?Sized>(
    a: &ExprTree,
    b: &ExprTree,
    max_depth: usize,
    rng: &mut R,
) -> (ExprTree, ExprTree) {
    let (child_a, child_b) = swap_at(
        a,
        b,
        rng.random_range(0..a.size()),
        rng.random_range(0..b.size()),
    );
    (
        if child_a.depth() > max_depth {
            a.clone()
        } else {
            child_a
        },
        if child_b.depth() > max_depth {
            b.clone()
        } else {
            child_b
        },
    )
}

/// Raw subtree exchange at fixed points, before any depth check.
pub(crate) fn swap_at(
    a: &ExprTree,
    b: &ExprTree,
    at_a: usize,
    at_b: usize,
) -> (ExprTree, ExprTree) {
    let sub_a = &a.nodes()[at_a..a.subtree_end(at_a)];
    let sub_b = &b.nodes()[at_b..b.subtree_end(at_b)];
    (a.splice(at_a, sub_b), b.splice(at_b, sub_a))
}

/// Replaces a uniformly chosen node of `a` with a fresh grow subtree.
///
/// Returns `a` unchanged if the result would exceed `max_depth`.
pub fn subtree_mutation<R: Rng + ?Sized>(
    a: &ExprTree,
    ps: &PrimitiveSet,
    max_depth: usize,
    rng: &mut R,
) -> ExprTree {
    mutate_traced(a, ps, max_depth, rng).0
}

/// As [`subtree_mutation`], also returning the chosen node index.
pub(crate) fn mutate_traced<R: Rng + ?Sized>(
    a: &ExprTree,
    ps: &PrimitiveSet,
    max_depth: usize,
    rng: &mut R,
) -> (ExprTree, usize) {
    let at = rng.random_range(0..a.size());
    (mutate_at(a, at, ps, max_depth, rng), at)
}

pub(crate) fn mutate_at<R: Rng + ?Sized>(
    a: &ExprTree,
    at: usize,
    ps: &PrimitiveSet,
    max_depth: usize,
    rng: &mut R,
) -> ExprTree {
    let (lo, hi) = MUTATION_DEPTH;
    let donor = random_tree(InitMethod::Grow, lo, hi, ps, rng);
    let child = a.splice(at, donor.nodes());
    if child.depth() > max_depth {
        a.clone()
    } else {
        child
    }
}
