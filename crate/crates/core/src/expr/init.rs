//! Random tree generators and ramped half-and-half initialization.

use std::ops::RangeInclusive;

use rand::Rng;

use super::{ExprTree, Node, PrimitiveSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitMethod {
    /// Every leaf sits at exactly the drawn depth.
    Full,
    /// Leaves may appear early once `min_depth` is reached.
    Grow,
}

fn random_leaf<R: Rng + ?Sized>(ps: &PrimitiveSet, rng: &mut R) -> Node {
    let k = rng.random_range(0..ps.n_terminals());
    if k < ps.n_variables {
        Node::Var(k)
    } else {
        Node::Const(ps.constants[rng.random_range(0..ps.constants.len())])
    }
}

/// Generates a tree whose leaves lie no deeper than `height`.
fn generate<R: Rng + ?Sized>(
    method: InitMethod,
    min_depth: usize,
    height: usize,
    ps: &PrimitiveSet,
    rng: &mut R,
) -> ExprTree {
    assert!(ps.n_terminals() > 0, "primitive set has no terminals");
    let ratio = ps.terminal_ratio();
    let mut nodes = Vec::new();
    // Depths of the slots still to be filled, innermost last.
    let mut slots = vec![0usize];
    while let Some(depth) = slots.pop() {
        let leaf = ps.ops.is_empty()
            || depth >= height
            || (method == InitMethod::Grow && depth >= min_depth && rng.random::<f64>() < ratio);
        if leaf {
            nodes.push(random_leaf(ps, rng));
        } else {
            let op = ps.ops[rng.random_range(0..ps.ops.len())];
            nodes.push(Node::Op(op));
            slots.extend(std::iter::repeat_n(depth + 1, op.arity()));
        }
    }
    ExprTree::from_nodes_unchecked(nodes)
}

/// Draws a height uniformly from `min_depth..=max_depth` and builds a tree
/// with `method` up to that height.
pub fn random_tree<R: Rng + ?Sized>(
    method: InitMethod,
    min_depth: usize,
    max_depth: usize,
    ps: &PrimitiveSet,
    rng: &mut R,
) -> ExprTree {
    assert!(
        min_depth <= max_depth,
        "min_depth {min_depth} > max_depth {max_depth}"
    );
    let height = rng.random_range(min_depth..=max_depth);
    generate(method, min_depth, height, ps, rng)
}

/// The (method, height) assignment for each slot of a ramped population:
/// slots alternate full/grow and cycle through the depth range, so every
/// bucket receives `pop_size / (2 · depths)` trees, give or take one.
pub fn ramped_plan(pop_size: usize, depths: RangeInclusive<usize>) -> Vec<(InitMethod, usize)> {
    let (lo, hi) = (*depths.start(), *depths.end());
    assert!(lo <= hi, "empty depth range");
    let span = hi - lo + 1;
    (0..pop_size)
        .map(|i| {
            let method = if i % 2 == 0 {
                InitMethod::Full
            } else {
                InitMethod::Grow
            };
            (method, lo + (i / 2) % span)
        })
        .collect()
}

/// Ramped half-and-half population over `depths` (inclusive).
pub fn ramped_half_and_half<R: Rng + ?Sized>(
    pop_size: usize,
    depths: RangeInclusive<usize>,
    ps: &PrimitiveSet,
    rng: &mut R,
) -> Vec<ExprTree> {
    let min = *depths.start();
    ramped_plan(pop_size, depths)
        .into_iter()
        .map(|(method, height)| generate(method, min, height, ps, rng))
        .collect()
}
