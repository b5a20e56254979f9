//! Datasets: Friedman generators, target noise, train/test splits, CSV I/O.

mod csv_io;
mod friedman;
mod manifest;
mod noise;
mod split;

use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, write_csv};
pub use friedman::{
    friedman1_target, friedman2_target, friedman3_target, gen_friedman1, gen_friedman2,
    gen_friedman3,
};
pub use manifest::{Manifest, ManifestEntry};
pub use noise::{add_noise, population_std, NoiseSpec};
pub use split::{train_count, train_test_split, SplitDataset, TRAIN_FRACTION};

/// Column-major feature storage; column `j` holds feature `x_j` for every row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    columns: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn from_columns(n_rows: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(j) = columns.iter().position(|c| c.len() != n_rows) {
            return Err(Error::Usage(format!(
                "column {j} has {} rows, expected {n_rows}",
                columns[j].len()
            )));
        }
        Ok(Self { n_rows, columns })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::Usage(format!(
                "row {i} has {} values, expected {width}",
                rows[i].len()
            )));
        }
        let columns = (0..width)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Ok(Self {
            n_rows: rows.len(),
            columns,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Rows `rows`, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            n_rows: rows.len(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub x: FeatureMatrix,
    pub y: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset after checking shape and finiteness.
    pub fn new(name: impl Into<String>, x: FeatureMatrix, y: Vec<f64>) -> Result<Self> {
        let feature_names = (0..x.n_features()).map(|j| format!("x{j}")).collect();
        Self::with_feature_names(name, feature_names, x, y)
    }

    pub fn with_feature_names(
        name: impl Into<String>,
        feature_names: Vec<String>,
        x: FeatureMatrix,
        y: Vec<f64>,
    ) -> Result<Self> {
        if x.n_rows() != y.len() {
            return Err(Error::Usage(format!(
                "{} feature rows but {} targets",
                x.n_rows(),
                y.len()
            )));
        }
        if feature_names.len() != x.n_features() {
            return Err(Error::Usage(
                "feature name count does not match feature count".into(),
            ));
        }
        if !y.iter().all(|v| v.is_finite()) || !x.columns.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::Usage("dataset contains non-finite values".into()));
        }
        Ok(Self {
            name: name.into(),
            feature_names,
            x,
            y,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.x.n_features()
    }

    /// The rows `rows` as a new dataset with the same name and columns.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            x: self.x.select_rows(rows),
            y: rows.iter().map(|&i| self.y[i]).collect(),
        }
    }
}

fn default_features() -> usize {
    10
}

fn default_instances() -> usize {
    100
}

fn default_target() -> String {
    "target".into()
}

/// Where a run's data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSource {
    Friedman1 {
        #[serde(default = "default_features")]
        features: usize,
        #[serde(default = "default_instances")]
        instances: usize,
    },
    Friedman2 {
        #[serde(default = "default_instances")]
        instances: usize,
    },
    Friedman3 {
        #[serde(default = "default_instances")]
        instances: usize,
    },
    Csv {
        path: PathBuf,
        #[serde(default = "default_target")]
        target: String,
    },
}

impl DatasetSource {
    /// Short problem label used in result paths.
    pub fn label(&self) -> String {
        match self {
            DatasetSource::Friedman1 { features, .. } if *features == default_features() => {
                "friedman1".into()
            }
            DatasetSource::Friedman1 { features, .. } => format!("friedman1-f{features}"),
            DatasetSource::Friedman2 { .. } => "friedman2".into(),
            DatasetSource::Friedman3 { .. } => "friedman3".into(),
            DatasetSource::Csv { path, .. } => path
                .file_stem()
                .map_or_else(|| "csv".into(), |s| s.to_string_lossy().into_owned()),
        }
    }

    /// Generates or reads the clean dataset; `rng` is only used by generators.
    pub fn load<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Dataset> {
        let mut ds = match self {
            DatasetSource::Friedman1 {
                features,
                instances,
            } => gen_friedman1(*features, *instances, rng)?,
            DatasetSource::Friedman2 { instances } => gen_friedman2(*instances, rng)?,
            DatasetSource::Friedman3 { instances } => gen_friedman3(*instances, rng)?,
            DatasetSource::Csv { path, target } => load_csv(path, target)?,
        };
        ds.name = self.label();
        Ok(ds)
    }
}
