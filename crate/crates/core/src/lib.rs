//! Tree-based genetic programming for symbolic regression.
//!
//! Parent selection (tournament, lexicase, ε-lexicase) and per-generation
//! training-case down-sampling (none, random, informed) are independent
//! strategies. Both families sit behind trait objects and are looked up by
//! name in a [`registry::Registry`], so a run configuration can pick any
//! pairing at runtime.

pub mod data;
pub mod downsample;
pub mod engine;
pub mod error;
pub mod expr;
pub mod metrics;
pub mod registry;
pub mod rng;
pub mod selection;

pub use error::{Error, Result};
