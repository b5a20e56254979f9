//! Run configuration.
//!
//! The layout mirrors the dotted-key config file read by the CLI
//! (`run.pop_size`, `selection.method`, `downsample.rate`, `data.noise`, ...).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{DatasetSource, Manifest, NoiseSpec, SplitDataset, TRAIN_FRACTION};
use crate::downsample::DownsampleConfig;
use crate::error::{Error, Result};
use crate::expr::MAX_DEPTH;
use crate::rng::{stream, Stream};
use crate::selection::{SelectionParams, TOURNAMENT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionParams {
    pub pop_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub max_depth: usize,
    pub init_min_depth: usize,
    pub init_max_depth: usize,
    /// Evaluate the whole population on all training cases to find the
    /// tracked best. When off, the sample-best individual is used instead.
    pub full_eval_logging: bool,
    /// Round errors to this many decimals before counting distinct vectors.
    pub diversity_decimals: Option<i32>,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        Self {
            pop_size: 500,
            generations: 2000,
            crossover_prob: 0.95,
            mutation_prob: 0.05,
            max_depth: MAX_DEPTH,
            init_min_depth: 1,
            init_max_depth: 4,
            full_eval_logging: true,
            diversity_decimals: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    pub method: String,
    pub tournament_size: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            method: TOURNAMENT.into(),
            tournament_size: 7,
        }
    }
}

impl SelectionConfig {
    pub fn params(&self) -> SelectionParams {
        SelectionParams {
            tournament_size: self.tournament_size,
        }
    }
}

/// Where the data comes from and how it is split and perturbed.
///
/// `generator` is one of `friedman1`, `friedman2`, `friedman3`, `csv`, or
/// `manifest`; the other keys apply only to some generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub generator: String,
    pub features: Option<usize>,
    pub instances: Option<usize>,
    pub path: Option<PathBuf>,
    pub target: Option<String>,
    pub manifest: Option<PathBuf>,
    pub name: Option<String>,
    /// Noise level γ applied to training targets.
    pub noise: f64,
    pub train_fraction: f64,
    /// Seed for generation, split, and noise; defaults to the run seed.
    pub seed: Option<u64>,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            generator: "friedman1".into(),
            features: None,
            instances: None,
            path: None,
            target: None,
            manifest: None,
            name: None,
            noise: 0.0,
            train_fraction: TRAIN_FRACTION,
            seed: None,
        }
    }
}

impl DataConfig {
    pub fn from_source(source: &DatasetSource) -> Self {
        let mut cfg = DataConfig::default();
        match source {
            DatasetSource::Friedman1 {
                features,
                instances,
            } => {
                cfg.features = Some(*features);
                cfg.instances = Some(*instances);
            }
            DatasetSource::Friedman2 { instances } | DatasetSource::Friedman3 { instances } => {
                cfg.generator = source.label();
                cfg.instances = Some(*instances);
            }
            DatasetSource::Csv { path, target } => {
                cfg.generator = "csv".into();
                cfg.path = Some(path.clone());
                cfg.target = Some(target.clone());
            }
        }
        cfg
    }

    fn reject(&self, key: &str, present: bool) -> Result<()> {
        if present {
            return Err(Error::Config(format!(
                "data.{key} does not apply to generator `{}`",
                self.generator
            )));
        }
        Ok(())
    }

    pub fn source(&self) -> Result<DatasetSource> {
        let instances = self.instances.unwrap_or(100);
        match self.generator.as_str() {
            "friedman1" => {
                self.reject("path", self.path.is_some())?;
                Ok(DatasetSource::Friedman1 {
                    features: self.features.unwrap_or(10),
                    instances,
                })
            }
            "friedman2" | "friedman3" => {
                self.reject("features", self.features.is_some())?;
                self.reject("path", self.path.is_some())?;
                Ok(if self.generator == "friedman2" {
                    DatasetSource::Friedman2 { instances }
                } else {
                    DatasetSource::Friedman3 { instances }
                })
            }
            "csv" => {
                self.reject("features", self.features.is_some())?;
                self.reject("instances", self.instances.is_some())?;
                let path = self
                    .path
                    .clone()
                    .ok_or_else(|| Error::Config("data.path is required for generator `csv`".into()))?;
                Ok(DatasetSource::Csv {
                    path,
                    target: self.target.clone().unwrap_or_else(|| "target".into()),
                })
            }
            "manifest" => {
                let manifest = self.manifest.as_ref().ok_or_else(|| {
                    Error::Config("data.manifest is required for generator `manifest`".into())
                })?;
                let name = self
                    .name
                    .as_deref()
                    .ok_or_else(|| Error::Config("data.name is required for generator `manifest`".into()))?;
                let entry = Manifest::read(manifest)?.get(name)?.clone();
                let base = manifest.parent().unwrap_or(Path::new(""));
                Ok(DatasetSource::Csv {
                    path: base.join(entry.path),
                    target: entry.target,
                })
            }
            other => Err(Error::Config(format!(
                "unknown data.generator `{other}` (known: friedman1, friedman2, friedman3, csv, manifest)"
            ))),
        }
    }

    /// Makes relative `path` and `manifest` relative to `base` instead.
    pub fn rebase(&mut self, base: &Path) {
        for p in [&mut self.path, &mut self.manifest].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    /// Loads or generates the data, then splits it and adds training noise.
    pub fn build(&self, run_seed: u64) -> Result<SplitDataset> {
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::Config(format!(
                "data.noise must be ≥ 0, got {}",
                self.noise
            )));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "data.train_fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        let seed = self.seed.unwrap_or(run_seed);
        let ds = self.source()?.load(&mut stream(seed, Stream::Data))?;
        if ds.len() < 2 {
            return Err(Error::Config(format!(
                "dataset `{}` needs at least 2 rows",
                ds.name
            )));
        }
        Ok(SplitDataset::new(
            &ds,
            self.train_fraction,
            NoiseSpec::new(self.noise),
            &mut stream(seed, Stream::Split),
            &mut stream(seed, Stream::Noise),
        ))
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub run: EvolutionParams,
    pub selection: SelectionConfig,
    pub downsample: DownsampleConfig,
    pub data: DataConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let r = &self.run;
        if r.pop_size == 0 || r.generations == 0 {
            return Err(Error::Config(
                "run.pop_size and run.generations must be at least 1".into(),
            ));
        }
        for (key, p) in [
            ("crossover_prob", r.crossover_prob),
            ("mutation_prob", r.mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!(
                    "run.{key} must be in [0, 1], got {p}"
                )));
            }
        }
        if r.init_min_depth > r.init_max_depth || r.init_max_depth > r.max_depth {
            return Err(Error::Config(format!(
                "need init_min_depth ≤ init_max_depth ≤ max_depth, got {} / {} / {}",
                r.init_min_depth, r.init_max_depth, r.max_depth
            )));
        }
        if self.selection.tournament_size == 0 {
            return Err(Error::Config(
                "selection.tournament_size must be at least 1".into(),
            ));
        }
        self.downsample.validate()
    }
}
