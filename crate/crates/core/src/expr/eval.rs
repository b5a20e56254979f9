//! Vectorized evaluation over the rows of a feature matrix.

use super::{ExprTree, Node, Op};
use crate::data::FeatureMatrix;
use crate::error::Result;

/// Magnitude bound applied to every node output.
///
/// Overflow saturates at ±`f64::MAX` instead of becoming ±inf, so every
/// intermediate stays finite and no inf − inf, 0 · inf, or sin(inf) can
/// produce NaN. Finite values pass through unchanged.
pub const CLAMP: f64 = f64::MAX;

#[inline]
fn clamp(v: f64) -> f64 {
    debug_assert!(!v.is_nan());
    v.clamp(-CLAMP, CLAMP)
}

/// Reusable evaluation scratch space.
#[derive(Debug, Default)]
pub struct Evaluator {
    pool: Vec<Vec<f64>>,
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    fn buffer(&mut self, n: usize) -> Vec<f64> {
        let mut b = self.pool.pop().unwrap_or_default();
        b.clear();
        b.reserve(n);
        b
    }

    /// Predictions of `tree` for every row of `x`.
    pub fn eval(&mut self, tree: &ExprTree, x: &FeatureMatrix) -> Result<Vec<f64>> {
        tree.check_variables(x.n_features())?;
        let n = x.n_rows();
        let mut stack: Vec<Vec<f64>> = Vec::new();
        for node in tree.nodes().iter().rev() {
            match *node {
                Node::Var(j) => {
                    let mut b = self.buffer(n);
                    b.extend(x.column(j).iter().map(|&v| clamp(v)));
                    stack.push(b);
                }
                Node::Const(c) => {
                    let mut b = self.buffer(n);
                    b.resize(n, clamp(c));
                    stack.push(b);
                }
                Node::Op(op) if op.arity() == 1 => {
                    let mut a = stack.pop().expect("arity-consistent tree");
                    let f: fn(f64) -> f64 = match op {
                        Op::Sin => f64::sin,
                        Op::Cos => f64::cos,
                        _ => |v| -v,
                    };
                    a.iter_mut().for_each(|v| *v = clamp(f(*v)));
                    stack.push(a);
                }
                Node::Op(op) => {
                    let mut a = stack.pop().expect("arity-consistent tree");
                    let b = stack.pop().expect("arity-consistent tree");
                    let f: fn(f64, f64) -> f64 = match op {
                        Op::Add => |l, r| l + r,
                        Op::Sub => |l, r| l - r,
                        Op::Mul => |l, r| l * r,
                        _ => |l, r| l / (1.0 + r * r).sqrt(),
                    };
                    a.iter_mut()
                        .zip(&b)
                        .for_each(|(l, &r)| *l = clamp(f(*l, r)));
                    self.pool.push(b);
                    stack.push(a);
                }
            }
        }
        let out = stack.pop().expect("non-empty tree");
        debug_assert!(stack.is_empty());
        Ok(out)
    }
}

/// One-shot evaluation; see [`Evaluator`] to reuse buffers across trees.
pub fn eval_tree(tree: &ExprTree, x: &FeatureMatrix) -> Result<Vec<f64>> {
    Evaluator::new().eval(tree, x)
}
