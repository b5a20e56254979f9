//! Canonical prefix s-expression text: `(add (mul x0 x1) 1)`.
//!
//! Constants use Rust's shortest round-trip float formatting, so
//! print → parse → print is byte-identical.

use std::fmt;
use std::str::FromStr;

use super::{ExprTree, Node, Op};
use crate::error::Error;

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Pending closing parens per open operator: remaining operand counts.
        let mut pending: Vec<usize> = Vec::new();
        for (i, node) in self.nodes().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match node {
                Node::Var(j) => write!(f, "x{j}")?,
                Node::Const(c) => write!(f, "{c}")?,
                Node::Op(op) => {
                    write!(f, "({op}")?;
                    pending.push(op.arity());
                    continue;
                }
            }
            while let Some(left) = pending.last_mut() {
                *left -= 1;
                if *left > 0 {
                    break;
                }
                f.write_str(")")?;
                pending.pop();
            }
        }
        Ok(())
    }
}

fn tokenize(s: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in s.char_indices() {
        let delim = ch == '(' || ch == ')' || ch.is_whitespace();
        if delim {
            if let Some(st) = start.take() {
                tokens.push(&s[st..i]);
            }
            if !ch.is_whitespace() {
                tokens.push(&s[i..i + 1]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        tokens.push(&s[st..]);
    }
    tokens
}

fn parse_atom(tok: &str) -> Result<Node, Error> {
    if let Some(idx) = tok.strip_prefix('x') {
        return idx
            .parse::<usize>()
            .map(Node::Var)
            .map_err(|_| Error::Parse(format!("bad variable `{tok}`")));
    }
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Node::Const(v)),
        _ => Err(Error::Parse(format!("unexpected token `{tok}`"))),
    }
}

impl FromStr for ExprTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens = tokenize(s);
        let mut nodes = Vec::new();
        // Operand counts still expected by each open paren.
        let mut open: Vec<(Op, usize)> = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match tokens[i] {
                "(" => {
                    let name = tokens.get(i + 1).copied().unwrap_or("");
                    let op = Op::from_name(name)
                        .ok_or_else(|| Error::Parse(format!("unknown operator `{name}`")))?;
                    nodes.push(Node::Op(op));
                    open.push((op, 0));
                    i += 2;
                    continue;
                }
                ")" => {
                    let (op, seen) = open
                        .pop()
                        .ok_or_else(|| Error::Parse("unbalanced `)`".into()))?;
                    if seen != op.arity() {
                        return Err(Error::Parse(format!(
                            "{op} expects {} operand(s), got {seen}",
                            op.arity()
                        )));
                    }
                }
                tok => nodes.push(parse_atom(tok)?),
            }
            // A completed atom or sub-expression counts as one operand of its parent.
            if let Some(parent) = open.last_mut() {
                parent.1 += 1;
            } else if i + 1 != tokens.len() {
                return Err(Error::Parse("trailing input after expression".into()));
            }
            i += 1;
        }
        if !open.is_empty() {
            return Err(Error::Parse("unbalanced `(`".into()));
        }
        ExprTree::from_nodes(nodes)
    }
}
