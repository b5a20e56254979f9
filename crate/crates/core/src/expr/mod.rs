//! Prefix-encoded expression trees over a fixed primitive set.

mod eval;
mod init;
mod sexpr;
mod variation;

use std::fmt;

use crate::error::{Error, Result};

pub use eval::{eval_tree, Evaluator, CLAMP};
pub use init::{ramped_half_and_half, ramped_plan, random_tree, InitMethod};
pub use variation::{subtree_crossover, subtree_mutation, MUTATION_DEPTH};

/// Depth limit applied to every tree admitted into a population.
pub const MAX_DEPTH: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    /// Analytic quotient `a / sqrt(1 + b²)`.
    Aq,
    Sin,
    Cos,
    Neg,
}

impl Op {
    pub const ALL: [Op; 7] = [Op::Add, Op::Sub, Op::Mul, Op::Aq, Op::Sin, Op::Cos, Op::Neg];

    pub fn arity(self) -> usize {
        match self {
            Op::Add | Op::Sub | Op::Mul | Op::Aq => 2,
            Op::Sin | Op::Cos | Op::Neg => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Aq => "aq",
            Op::Sin => "sin",
            Op::Cos => "cos",
            Op::Neg => "neg",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.name() == name)
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Var(usize),
    Const(f64),
    Op(Op),
}

impl Node {
    pub fn arity(self) -> usize {
        match self {
            Node::Op(op) => op.arity(),
            Node::Var(_) | Node::Const(_) => 0,
        }
    }
}

/// Terminals and operators available to tree generation.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveSet {
    pub n_variables: usize,
    /// Values an ephemeral random constant may take. Empty disables ERCs.
    pub constants: Vec<f64>,
    pub ops: Vec<Op>,
}

impl PrimitiveSet {
    /// Variables `x0..x{n-1}`, ERC values {−1, 0, 1}, and all seven operators.
    pub fn standard(n_variables: usize) -> Self {
        Self {
            n_variables,
            constants: vec![-1.0, 0.0, 1.0],
            ops: Op::ALL.to_vec(),
        }
    }

    /// Number of terminal kinds; the ERC counts once regardless of its value set.
    pub fn n_terminals(&self) -> usize {
        self.n_variables + usize::from(!self.constants.is_empty())
    }

    /// Probability that grow places a leaf once its minimum depth is reached.
    pub fn terminal_ratio(&self) -> f64 {
        let t = self.n_terminals() as f64;
        t / (t + self.ops.len() as f64)
    }
}

/// A symbolic expression stored as its prefix (Polish) node sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprTree {
    nodes: Vec<Node>,
}

impl ExprTree {
    /// Wraps a node sequence after checking it encodes exactly one expression.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut open = 1usize;
        for (i, node) in nodes.iter().enumerate() {
            if open == 0 {
                return Err(Error::Parse(format!("trailing nodes from position {i}")));
            }
            if let Node::Const(c) = node {
                if !c.is_finite() {
                    return Err(Error::Parse(format!("non-finite constant at position {i}")));
                }
            }
            open = open - 1 + node.arity();
        }
        if open != 0 {
            return Err(Error::Parse(format!("{open} missing operand(s)")));
        }
        Ok(Self { nodes })
    }

    pub(crate) fn from_nodes_unchecked(nodes: Vec<Node>) -> Self {
        debug_assert!(ExprTree::from_nodes(nodes.clone()).is_ok());
        Self { nodes }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_nodes_unchecked(vec![Node::Const(value)])
    }

    pub fn var(index: usize) -> Self {
        Self::from_nodes_unchecked(vec![Node::Var(index)])
    }

    /// Applies `op` to `args` (which must match its arity).
    pub fn apply(op: Op, args: &[ExprTree]) -> Result<Self> {
        if args.len() != op.arity() {
            return Err(Error::Usage(format!(
                "{op} takes {} argument(s), got {}",
                op.arity(),
                args.len()
            )));
        }
        let mut nodes = vec![Node::Op(op)];
        for a in args {
            nodes.extend_from_slice(&a.nodes);
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Length of the longest root-to-leaf path; a lone leaf has depth 0.
    pub fn depth(&self) -> usize {
        let mut stack: Vec<usize> = Vec::with_capacity(self.nodes.len());
        for node in self.nodes.iter().rev() {
            let arity = node.arity();
            let mut d = 0;
            for _ in 0..arity {
                d = d.max(stack.pop().expect("arity-consistent tree") + 1);
            }
            stack.push(d);
        }
        stack.pop().expect("non-empty tree")
    }

    /// Exclusive end index of the subtree rooted at `start`.
    pub fn subtree_end(&self, start: usize) -> usize {
        let mut open = 1usize;
        let mut i = start;
        while open > 0 {
            open = open - 1 + self.nodes[i].arity();
            i += 1;
        }
        i
    }

    /// Replaces the subtree rooted at `at` with `donor`.
    pub(crate) fn splice(&self, at: usize, donor: &[Node]) -> ExprTree {
        let end = self.subtree_end(at);
        let mut nodes = Vec::with_capacity(self.nodes.len() - (end - at) + donor.len());
        nodes.extend_from_slice(&self.nodes[..at]);
        nodes.extend_from_slice(donor);
        nodes.extend_from_slice(&self.nodes[end..]);
        ExprTree::from_nodes_unchecked(nodes)
    }

    /// Highest variable index referenced, if any.
    pub fn max_variable(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Var(i) => Some(*i),
                _ => None,
            })
            .max()
    }

    pub fn check_variables(&self, n_features: usize) -> Result<()> {
        match self.max_variable() {
            Some(index) if index >= n_features => {
                Err(Error::VariableOutOfRange { index, n_features })
            }
            _ => Ok(()),
        }
    }
}
