//! Result files of a single run.
//!
//! Each run writes `<stem>.csv` (one row per generation, columns as in
//! [`GenerationRecord`]) and `<stem>.json` (final metrics, best expression,
//! budget, config, and timings). The JSON is written last, so its presence
//! marks a completed run. A failed run leaves `<stem>.error.txt` instead.

use std::io::Write;
use std::path::{Path, PathBuf};

use dsgp_core::engine::{run_on, RunConfig, RunResult};
use dsgp_core::metrics::{GenerationRecord, PhaseTimes};
use serde::{Deserialize, Serialize};

use crate::config::problem_label;
use crate::error::{IoContext, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Key of the JSON object holding wall-clock fields. Everything else in the
/// summary is a deterministic function of the config.
pub const TIMINGS_KEY: &str = "timings";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub best_train_mse: f64,
    pub best_test_mse: f64,
    pub generalization_gap: f64,
    pub error_diversity: f64,
    pub median_tree_size: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub wall_clock_secs: f64,
    pub downsample_secs: f64,
    pub evaluation_secs: f64,
    pub selection_secs: f64,
    pub variation_secs: f64,
    pub logging_secs: f64,
}

impl Timings {
    fn new(wall: std::time::Duration, p: &PhaseTimes) -> Self {
        Self {
            wall_clock_secs: wall.as_secs_f64(),
            downsample_secs: p.downsample.as_secs_f64(),
            evaluation_secs: p.evaluation.as_secs_f64(),
            selection_secs: p.selection.as_secs_f64(),
            variation_secs: p.variation.as_secs_f64(),
            logging_secs: p.logging.as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub problem: String,
    pub noise: f64,
    pub selection: String,
    pub downsample: String,
    pub seed: u64,
    pub generations: usize,
    #[serde(rename = "final")]
    pub final_metrics: FinalMetrics,
    /// Prefix s-expression, e.g. `(add x0 (mul x1 1))`.
    pub best_expression: String,
    pub best_size: usize,
    pub best_depth: usize,
    pub evaluations: u64,
    pub refresh_generations: Vec<usize>,
    pub config: RunConfig,
    pub timings: Timings,
}

impl RunSummary {
    pub fn new(cfg: &RunConfig, result: &RunResult) -> Result<Self> {
        let last = result
            .records
            .last()
            .expect("a run has at least one generation");
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            problem: problem_label(&cfg.data)?,
            noise: cfg.data.noise,
            selection: cfg.selection.method.clone(),
            downsample: cfg.downsample.strategy.clone(),
            seed: cfg.seed,
            generations: result.records.len(),
            final_metrics: FinalMetrics {
                best_train_mse: last.best_train_mse,
                best_test_mse: last.best_test_mse,
                generalization_gap: last.generalization_gap,
                error_diversity: last.error_diversity,
                median_tree_size: last.median_tree_size,
            },
            best_expression: result.best.genome.to_string(),
            best_size: result.best.genome.size(),
            best_depth: result.best.genome.depth(),
            evaluations: result.evaluations,
            refresh_generations: result.refresh_generations.clone(),
            config: cfg.clone(),
            timings: Timings::new(result.wall_clock, &result.phase_times),
        })
    }
}

/// Paths of one run's files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub error: PathBuf,
}

impl RunFiles {
    pub fn new(dir: &Path, stem: &str) -> Self {
        Self {
            csv: dir.join(format!("{stem}.csv")),
            json: dir.join(format!("{stem}.json")),
            error: dir.join(format!("{stem}.error.txt")),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.csv.is_file() && self.json.is_file()
    }
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).at(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = std::fs::File::create(&tmp).at(&tmp)?;
    f.write_all(bytes).at(&tmp)?;
    f.sync_all().at(&tmp)?;
    drop(f);
    std::fs::rename(&tmp, path).at(path)
}

pub fn records_csv(records: &[GenerationRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    Ok(w.into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?)
}

pub fn read_records(path: &Path) -> Result<Vec<GenerationRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path).at(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// The summary JSON with the timing object removed, for determinism checks.
pub fn strip_timings(json: &str) -> Result<serde_json::Value> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove(TIMINGS_KEY);
    }
    Ok(v)
}

/// Runs `cfg` and writes its CSV and JSON.
///
/// On failure the error text goes to the error file and the error is
/// returned. A stale error file is removed on success.
pub fn execute(
    cfg: &RunConfig,
    files: &RunFiles,
    progress: impl FnMut(usize, f64),
) -> Result<RunSummary> {
    let outcome = (|| {
        let data = cfg.data.build(cfg.seed)?;
        let result = run_on(cfg, data, progress)?;
        let summary = RunSummary::new(cfg, &result)?;
        write_atomic(&files.csv, &records_csv(&result.records)?)?;
        let mut json = serde_json::to_vec_pretty(&summary)?;
        json.push(b'\n');
        write_atomic(&files.json, &json)?;
        Ok(summary)
    })();
    match &outcome {
        Ok(_) => {
            if files.error.exists() {
                std::fs::remove_file(&files.error).at(&files.error)?;
            }
        }
        Err(e) => {
            let _ = write_atomic(&files.error, format!("{e}\n").as_bytes());
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.run.pop_size = 10;
        cfg.run.generations = 5;
        cfg
    }

    #[test]
    fn writes_csv_and_json() {
        let dir = tempfile::tempdir().unwrap();
        let files = RunFiles::new(dir.path(), "run-0");
        let s = execute(&tiny(), &files, |_, _| {}).unwrap();
        assert!(files.is_complete());
        let recs = read_records(&files.csv).unwrap();
        assert_eq!(recs.len(), 5);
        let header = std::fs::read_to_string(&files.csv).unwrap();
        assert!(header.starts_with(&GenerationRecord::CSV_COLUMNS.join(",")));
        let back = read_summary(&files.json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.final_metrics.best_test_mse, recs[4].best_test_mse);
        let parsed: dsgp_core::expr::ExprTree = back.best_expression.parse().unwrap();
        assert_eq!(parsed.size(), back.best_size);
    }

    #[test]
    fn failure_leaves_error_file() {
        let dir = tempfile::tempdir().unwrap();
        let files = RunFiles::new(dir.path(), "run-0");
        let mut cfg = tiny();
        cfg.data.generator = "csv".into();
        cfg.data.path = Some(dir.path().join("missing.csv"));
        assert!(execute(&cfg, &files, |_, _| {}).is_err());
        assert!(files.error.is_file() && !files.is_complete());
    }

    #[test]
    fn strip_timings_removes_only_timings() {
        let v = strip_timings(r#"{"a": 1, "timings": {"wall_clock_secs": 2.0}}"#).unwrap();
        assert_eq!(v, serde_json::json!({"a": 1}));
    }
}
