//! Experiment specs: the factor grid of a sweep.
//!
//! ```toml
//! base_seed = 42
//! runs_per_cell = 30
//! noise_levels = [0.0, 0.05, 0.1, 0.15]
//! selection_methods = ["tournament", "eps_lexicase"]
//! downsample_strategies = ["none", "random", "informed"]
//!
//! [overrides]
//! run.pop_size = 100
//! run.generations = 300
//!
//! [[problems]]
//! generator = "friedman1"
//! features = 25
//!
//! [[problems]]
//! generator = "csv"
//! path = "data/505_tecator.csv"
//! ```
//!
//! Problems take the `data.*` keys of a run config except `noise` and
//! `seed`, which the grid sets per cell and run.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use dsgp_core::downsample::downsamplers;
use dsgp_core::engine::{DataConfig, RunConfig};
use dsgp_core::selection::selectors;
use serde::Deserialize;

use crate::config::{apply_overrides, noise_label, problem_label};
use crate::error::{BenchError, IoContext, Result};
use crate::seeds::stable_hash;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub base_seed: u64,
    pub runs_per_cell: usize,
    pub noise_levels: Vec<f64>,
    pub selection_methods: Vec<String>,
    pub downsample_strategies: Vec<String>,
    pub problems: Vec<DataConfig>,
    /// Partial run config applied to every cell.
    pub overrides: toml::Table,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            base_seed: 0,
            runs_per_cell: 30,
            noise_levels: vec![0.0],
            selection_methods: Vec::new(),
            downsample_strategies: Vec::new(),
            problems: Vec::new(),
            overrides: toml::Table::new(),
        }
    }
}

/// One combination of problem, noise level, selection method, and strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub problem: String,
    pub data: DataConfig,
    pub noise: f64,
    pub selection: String,
    pub strategy: String,
}

impl Cell {
    /// `<selection>-<strategy>`
    pub fn method(&self) -> String {
        format!("{}-{}", self.selection, self.strategy)
    }

    /// `<problem>/<noise>/<selection>-<strategy>`, also the result directory.
    pub fn key(&self) -> String {
        format!(
            "{}/{}/{}",
            self.problem,
            noise_label(self.noise),
            self.method()
        )
    }

    pub fn dir(&self, root: &Path) -> PathBuf {
        root.join(&self.problem)
            .join(noise_label(self.noise))
            .join(self.method())
    }

    /// Seed of the evolutionary run `r`.
    pub fn run_seed(&self, base_seed: u64, r: usize) -> u64 {
        stable_hash(base_seed, &self.key(), r as u64)
    }

    /// Seed of the data of run `r`. Cells sharing problem and noise level
    /// see the same data for the same `r`, so methods are compared on
    /// common datasets.
    pub fn data_seed(&self, base_seed: u64, r: usize) -> u64 {
        let key = format!("data/{}/{}", self.problem, noise_label(self.noise));
        stable_hash(base_seed, &key, r as u64)
    }
}

/// A single run of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RunJob {
    pub cell: Cell,
    pub index: usize,
    pub config: RunConfig,
}

impl RunJob {
    pub fn stem(&self) -> String {
        format!("run-{}", self.index)
    }
}

impl ExperimentSpec {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut spec: ExperimentSpec = toml::from_str(text).map_err(|e| BenchError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        if let Some(dir) = origin.parent() {
            for p in &mut spec.problems {
                p.rebase(dir);
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).at(path)?;
        Self::parse(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Spec(m));
        if self.runs_per_cell == 0 {
            return bad("runs_per_cell must be at least 1".into());
        }
        for (name, empty) in [
            ("problems", self.problems.is_empty()),
            ("noise_levels", self.noise_levels.is_empty()),
            ("selection_methods", self.selection_methods.is_empty()),
            (
                "downsample_strategies",
                self.downsample_strategies.is_empty(),
            ),
        ] {
            if empty {
                return bad(format!("{name} must not be empty"));
            }
        }
        if let Some(n) = self
            .noise_levels
            .iter()
            .find(|n| !(n.is_finite() && **n >= 0.0))
        {
            return bad(format!("noise level {n} must be finite and ≥ 0"));
        }
        for key in ["seed", "data"] {
            if self.overrides.contains_key(key) {
                return bad(format!(
                    "overrides may not set `{key}`; the grid controls it"
                ));
            }
        }
        let sel = selectors();
        let ds = downsamplers();
        for m in &self.selection_methods {
            if !sel.contains(m) {
                return bad(format!(
                    "unknown selection method `{m}` (known: {})",
                    sel.names().collect::<Vec<_>>().join(", ")
                ));
            }
        }
        for s in &self.downsample_strategies {
            if !ds.contains(s) {
                return bad(format!(
                    "unknown downsample strategy `{s}` (known: {})",
                    ds.names().collect::<Vec<_>>().join(", ")
                ));
            }
        }
        let mut labels = BTreeSet::new();
        for p in &self.problems {
            if p.noise != 0.0 || p.seed.is_some() {
                return bad(
                    "problems may not set noise or seed; use noise_levels and base_seed".into(),
                );
            }
            let label = problem_label(p)?;
            if !labels.insert(label.clone()) {
                return bad(format!("problem `{label}` is listed twice"));
            }
        }
        self.base_config()?;
        Ok(())
    }

    fn base_config(&self) -> Result<RunConfig> {
        apply_overrides(
            &RunConfig::default(),
            &self.overrides,
            Path::new("overrides"),
        )
    }

    /// Every cell, in problem, noise, selection, strategy order.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let mut cells = Vec::new();
        for data in &self.problems {
            let problem = problem_label(data)?;
            for &noise in &self.noise_levels {
                for selection in &self.selection_methods {
                    for strategy in &self.downsample_strategies {
                        cells.push(Cell {
                            problem: problem.clone(),
                            data: data.clone(),
                            noise,
                            selection: selection.clone(),
                            strategy: strategy.clone(),
                        });
                    }
                }
            }
        }
        Ok(cells)
    }

    /// Every run of the grid with its fully resolved config.
    pub fn jobs(&self) -> Result<Vec<RunJob>> {
        let base = self.base_config()?;
        let mut jobs = Vec::new();
        for cell in self.cells()? {
            for index in 0..self.runs_per_cell {
                let mut config = base.clone();
                config.seed = cell.run_seed(self.base_seed, index);
                config.selection.method = cell.selection.clone();
                config.downsample.strategy = cell.strategy.clone();
                config.data = DataConfig {
                    noise: cell.noise,
                    seed: Some(cell.data_seed(self.base_seed, index)),
                    ..cell.data.clone()
                };
                config.validate()?;
                jobs.push(RunJob {
                    cell: cell.clone(),
                    index,
                    config,
                });
            }
        }
        Ok(jobs)
    }
}
