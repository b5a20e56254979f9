use std::path::Path;

use super::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};

/// Reads a headered numeric CSV, taking `target` as the response column and
/// every other column, in file order, as a feature.
pub fn load_csv(path: impl AsRef<Path>, target: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let ingest = |row: usize, column: &str, message: String| Error::Ingest {
        path: path.to_path_buf(),
        row,
        column: column.to_owned(),
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let target_col = header
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| ingest(1, target, "missing target column".into()))?;

    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // Line numbers are 1-based and the header occupies line 1.
        let line = i + 2;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                len, expected_len, ..
            } => ingest(
                line,
                "*",
                format!("ragged row: {len} fields, expected {expected_len}"),
            ),
            _ => Error::Csv(e),
        })?;
        let mut row = Vec::with_capacity(header.len() - 1);
        for (j, cell) in record.iter().enumerate() {
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| ingest(line, &header[j], format!("non-numeric value `{cell}`")))?;
            if j == target_col {
                y.push(value);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }

    let feature_names = header
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != target_col)
        .map(|(_, h)| h.clone())
        .collect::<Vec<_>>();
    let x = if rows.is_empty() {
        FeatureMatrix::from_columns(0, vec![Vec::new(); feature_names.len()])?
    } else {
        FeatureMatrix::from_rows(&rows)?
    };
    let name = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    Dataset::with_feature_names(name, feature_names, x, y)
}

/// Writes `ds` with its feature names followed by a `target` column.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = ds.feature_names.clone();
    header.push("target".into());
    w.write_record(&header)?;
    for i in 0..ds.len() {
        let mut rec: Vec<String> = ds.x.row(i).iter().map(f64::to_string).collect();
        rec.push(ds.y[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
