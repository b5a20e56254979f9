//! Experiment harness around `dsgp-core`.
//!
//! Reads run configs and experiment specs, executes runs and factorial
//! sweeps, writes per-run CSV and JSON results, and turns a results tree
//! into summary tables and SVG figures.

pub mod aggregate;
pub mod config;
pub mod error;
pub mod gendata;
pub mod plot;
pub mod results;
pub mod seeds;
pub mod spec;
pub mod stats;
pub mod sweep;

pub use error::{BenchError, Result};
