//! Run-config files.
//!
//! A config is a TOML file of dotted keys, one run cell per file:
//!
//! ```toml
//! seed = 7
//! run.pop_size = 100
//! run.generations = 300
//! selection.method = "eps_lexicase"
//! downsample.strategy = "random"
//! downsample.rate = 0.1
//! data.generator = "friedman1"
//! data.features = 25
//! data.noise = 0.1
//! ```
//!
//! Every key is optional and defaults to the reference settings. Unknown
//! keys are errors. Relative data paths resolve against the file's directory.

use std::path::Path;

use dsgp_core::engine::{DataConfig, RunConfig};

use crate::error::{BenchError, IoContext, Result};

pub fn parse_run_config(text: &str, origin: &Path) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| BenchError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).at(path)?;
    let mut cfg = parse_run_config(&text, path)?;
    if let Some(dir) = path.parent() {
        cfg.data.rebase(dir);
    }
    Ok(cfg)
}

/// Applies a table of overrides on top of `base`, key by key.
pub fn apply_overrides(
    base: &RunConfig,
    overrides: &toml::Table,
    origin: &Path,
) -> Result<RunConfig> {
    let parse_err = |message: String| BenchError::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let toml::Value::Table(mut merged) =
        toml::Value::try_from(base).map_err(|e| parse_err(e.to_string()))?
    else {
        unreachable!("a struct serializes to a table")
    };
    merge(&mut merged, overrides);
    let cfg: RunConfig = toml::Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| parse_err(format!("in overrides: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn merge(into: &mut toml::Table, from: &toml::Table) {
    for (key, value) in from {
        match (into.get_mut(key), value) {
            (Some(toml::Value::Table(dst)), toml::Value::Table(src)) => merge(dst, src),
            _ => {
                into.insert(key.clone(), value.clone());
            }
        }
    }
}

/// Short name of the data a config points at, used as a directory name.
pub fn problem_label(data: &DataConfig) -> Result<String> {
    if data.generator == "manifest" {
        if let Some(name) = &data.name {
            return Ok(name.clone());
        }
    }
    Ok(data.source()?.label())
}

/// Directory name for a noise level: `0`, `0.05`, `0.1`, ...
pub fn noise_label(noise: f64) -> String {
    format!("{noise}")
}
