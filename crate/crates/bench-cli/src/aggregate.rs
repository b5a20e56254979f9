//! Summary tables over a results tree.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{BenchError, IoContext, Result};
use crate::results::{read_records, write_atomic, RunSummary, SCHEMA_VERSION};
use crate::stats::{iqr, mann_whitney, median};

/// Label written next to every p-value.
pub const TEST_LABEL: &str =
    "Mann-Whitney U, two-sided, normal approximation with tie correction (stand-in test)";

/// Results of one cell directory `<problem>/<noise>/<selection>-<strategy>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResults {
    pub problem: String,
    pub noise: String,
    pub method: String,
    pub dir: PathBuf,
    /// Completed runs by index.
    pub runs: BTreeMap<usize, RunSummary>,
    /// Runs with a CSV or error file but no JSON.
    pub incomplete: Vec<usize>,
}

impl CellResults {
    pub fn key(&self) -> String {
        format!("{}/{}/{}", self.problem, self.noise, self.method)
    }

    pub fn csv_path(&self, index: usize) -> PathBuf {
        self.dir.join(format!("run-{index}.csv"))
    }

    fn values(&self, f: impl Fn(&RunSummary) -> f64) -> Vec<f64> {
        self.runs.values().map(f).collect()
    }

    pub fn final_test_mse(&self) -> Vec<f64> {
        self.values(|r| r.final_metrics.best_test_mse)
    }

    pub fn final_gap(&self) -> Vec<f64> {
        self.values(|r| r.final_metrics.generalization_gap)
    }

    pub fn final_size(&self) -> Vec<f64> {
        self.values(|r| r.final_metrics.median_tree_size)
    }

    pub fn wall_clock(&self) -> Vec<f64> {
        self.values(|r| r.timings.wall_clock_secs)
    }

    /// Per-generation records of every completed run, by run index.
    pub fn series(&self) -> Result<Vec<Vec<dsgp_core::metrics::GenerationRecord>>> {
        self.runs
            .keys()
            .map(|&i| read_records(&self.csv_path(i)))
            .collect()
    }
}

fn run_index(file_name: &str, suffix: &str) -> Option<usize> {
    file_name
        .strip_prefix("run-")?
        .strip_suffix(suffix)?
        .parse()
        .ok()
}

fn subdirs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).at(dir)? {
        let path = entry.at(dir)?.path();
        if path.is_dir() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn read_versioned(path: &Path) -> Result<(u32, serde_json::Value)> {
    let text = std::fs::read_to_string(path).at(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let version = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .unwrap_or(0) as u32;
    Ok((version, value))
}

/// Reads every cell under `root`, in problem, noise, method order.
///
/// Fails if run files carry different schema versions, or a version this
/// build does not write.
pub fn scan(root: &Path) -> Result<Vec<CellResults>> {
    let mut cells = Vec::new();
    let mut versions: BTreeMap<u32, PathBuf> = BTreeMap::new();
    for problem in subdirs(root)? {
        for noise in subdirs(&problem)? {
            for method in subdirs(&noise)? {
                let mut cell = CellResults {
                    problem: name(&problem),
                    noise: name(&noise),
                    method: name(&method),
                    dir: method.clone(),
                    runs: BTreeMap::new(),
                    incomplete: Vec::new(),
                };
                let mut seen_other = Vec::new();
                for entry in std::fs::read_dir(&method).at(&method)? {
                    let path = entry.at(&method)?.path();
                    let file = name(&path);
                    if let Some(i) = run_index(&file, ".json") {
                        let (version, value) = read_versioned(&path)?;
                        versions.entry(version).or_insert_with(|| path.clone());
                        if version == SCHEMA_VERSION {
                            cell.runs.insert(i, serde_json::from_value(value)?);
                        }
                    } else if let Some(i) =
                        run_index(&file, ".csv").or_else(|| run_index(&file, ".error.txt"))
                    {
                        seen_other.push(i);
                    }
                }
                seen_other.sort_unstable();
                seen_other.dedup();
                cell.incomplete = seen_other
                    .into_iter()
                    .filter(|i| !cell.runs.contains_key(i))
                    .collect();
                if !cell.runs.is_empty() || !cell.incomplete.is_empty() {
                    cells.push(cell);
                }
            }
        }
    }
    match versions.len() {
        0 | 1 => {
            if let Some((&found, path)) = versions.iter().next() {
                if found != SCHEMA_VERSION {
                    return Err(BenchError::Schema {
                        path: path.clone(),
                        found,
                        expected: SCHEMA_VERSION,
                    });
                }
            }
        }
        _ => {
            let listing = versions
                .iter()
                .map(|(v, p)| format!("v{v} (e.g. {})", p.display()))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(BenchError::MixedSchema(listing));
        }
    }
    cells.sort_by(|a, b| {
        let noise = |c: &CellResults| c.noise.parse::<f64>().unwrap_or(f64::INFINITY);
        (&a.problem, noise(a), &a.method)
            .partial_cmp(&(&b.problem, noise(b), &b.method))
            .expect("noise labels are not NaN")
    });
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub noise: String,
    pub method: String,
    pub completed: usize,
    pub incomplete: usize,
    pub test_mse_median: f64,
    pub test_mse_iqr: f64,
    pub gap_median: f64,
    pub gap_iqr: f64,
    pub size_median: f64,
    pub size_iqr: f64,
    pub wall_clock_secs_median: f64,
    pub wall_clock_secs_iqr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub problem: String,
    pub noise: String,
    pub method_a: String,
    pub method_b: String,
    pub metric: String,
    pub n_a: usize,
    pub n_b: usize,
    pub u: f64,
    /// Two-sided p-value of the stand-in test named by [`TEST_LABEL`].
    pub p_mann_whitney_stand_in: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub schema_version: u32,
    pub statistical_test: &'static str,
    pub cells: Vec<SummaryRow>,
    pub comparisons: Vec<Comparison>,
}

type Metric = (&'static str, fn(&CellResults) -> Vec<f64>);

const METRICS: [Metric; 3] = [
    ("best_test_mse", CellResults::final_test_mse),
    ("generalization_gap", CellResults::final_gap),
    ("median_tree_size", CellResults::final_size),
];

pub fn summarize(cells: &[CellResults]) -> SummaryTable {
    let rows = cells
        .iter()
        .map(|c| {
            let (t, g, s, w) = (
                c.final_test_mse(),
                c.final_gap(),
                c.final_size(),
                c.wall_clock(),
            );
            SummaryRow {
                problem: c.problem.clone(),
                noise: c.noise.clone(),
                method: c.method.clone(),
                completed: c.runs.len(),
                incomplete: c.incomplete.len(),
                test_mse_median: median(&t),
                test_mse_iqr: iqr(&t),
                gap_median: median(&g),
                gap_iqr: iqr(&g),
                size_median: median(&s),
                size_iqr: iqr(&s),
                wall_clock_secs_median: median(&w),
                wall_clock_secs_iqr: iqr(&w),
            }
        })
        .collect();

    let mut comparisons = Vec::new();
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            if a.problem != b.problem
                || a.noise != b.noise
                || a.runs.is_empty()
                || b.runs.is_empty()
            {
                continue;
            }
            for (metric, values) in METRICS {
                let (va, vb) = (values(a), values(b));
                let test = mann_whitney(&va, &vb);
                comparisons.push(Comparison {
                    problem: a.problem.clone(),
                    noise: a.noise.clone(),
                    method_a: a.method.clone(),
                    method_b: b.method.clone(),
                    metric: metric.into(),
                    n_a: va.len(),
                    n_b: vb.len(),
                    u: test.u,
                    p_mann_whitney_stand_in: test.p_two_sided,
                });
            }
        }
    }
    SummaryTable {
        schema_version: SCHEMA_VERSION,
        statistical_test: TEST_LABEL,
        cells: rows,
        comparisons,
    }
}

const SUMMARY_COLUMNS: [&str; 13] = [
    "problem",
    "noise",
    "method",
    "completed",
    "incomplete",
    "test_mse_median",
    "test_mse_iqr",
    "gap_median",
    "gap_iqr",
    "size_median",
    "size_iqr",
    "wall_clock_secs_median",
    "wall_clock_secs_iqr",
];

const COMPARISON_COLUMNS: [&str; 9] = [
    "problem",
    "noise",
    "method_a",
    "method_b",
    "metric",
    "n_a",
    "n_b",
    "u",
    "p_mann_whitney_stand_in",
];

/// Serializes rows; the header comes from the first row, or from `header`
/// when there are none.
fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?)
}

/// Files written by [`write_summary`].
pub struct SummaryFiles {
    pub cells_csv: PathBuf,
    pub comparisons_csv: PathBuf,
    pub json: PathBuf,
}

/// Writes `summary.csv`, `comparisons.csv`, and `summary.json` into `out`.
pub fn write_summary(table: &SummaryTable, out: &Path) -> Result<SummaryFiles> {
    let files = SummaryFiles {
        cells_csv: out.join("summary.csv"),
        comparisons_csv: out.join("comparisons.csv"),
        json: out.join("summary.json"),
    };
    write_atomic(&files.cells_csv, &to_csv(&table.cells, &SUMMARY_COLUMNS)?)?;
    write_atomic(
        &files.comparisons_csv,
        &to_csv(&table.comparisons, &COMPARISON_COLUMNS)?,
    )?;
    let mut json = serde_json::to_vec_pretty(table)?;
    json.push(b'\n');
    write_atomic(&files.json, &json)?;
    Ok(files)
}

/// Scans `root`, summarizes, and writes the tables to `out`.
pub fn aggregate(root: &Path, out: &Path) -> Result<SummaryTable> {
    let cells = scan(root)?;
    if cells.iter().all(|c| c.runs.is_empty()) {
        return Err(BenchError::NoResults(root.to_path_buf()));
    }
    let table = summarize(&cells);
    write_summary(&table, out)?;
    Ok(table)
}
