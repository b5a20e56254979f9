//! Writes generated datasets as CSV files and records them in a manifest.

use std::path::{Path, PathBuf};

use dsgp_core::data::{write_csv, DatasetSource, Manifest, ManifestEntry};
use dsgp_core::rng::{stream, Stream};

use crate::error::{BenchError, IoContext, Result};
use crate::results::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Created,
    /// The file already held exactly these bytes.
    Unchanged,
    Overwritten,
}

fn describe(source: &DatasetSource) -> String {
    match source {
        DatasetSource::Friedman1 {
            features,
            instances,
        } => {
            format!("friedman1 features={features} instances={instances}")
        }
        DatasetSource::Friedman2 { instances } => format!("friedman2 instances={instances}"),
        DatasetSource::Friedman3 { instances } => format!("friedman3 instances={instances}"),
        DatasetSource::Csv { path, .. } => format!("csv {}", path.display()),
    }
}

/// Generates `source` with `seed` into `<out>/<name>.csv` and upserts the
/// manifest entry.
///
/// The data equal what a run config with `data.seed = seed` would generate.
/// An existing file with different contents is left alone unless `force`.
pub fn gen_data(
    source: &DatasetSource,
    seed: u64,
    out: &Path,
    name: Option<&str>,
    force: bool,
) -> Result<(PathBuf, Outcome)> {
    let name = name.map_or_else(|| source.label(), str::to_owned);
    let ds = source.load(&mut stream(seed, Stream::Data))?;
    std::fs::create_dir_all(out).at(out)?;

    let file = format!("{name}.csv");
    let path = out.join(&file);
    let scratch = out.join(format!(".{file}.{}.tmp", std::process::id()));
    write_csv(&ds, &scratch)?;
    let bytes = std::fs::read(&scratch).at(&scratch);
    std::fs::remove_file(&scratch).at(&scratch)?;
    let bytes = bytes?;

    let outcome = match std::fs::read(&path) {
        Ok(existing) if existing == bytes => Outcome::Unchanged,
        Ok(_) if !force => return Err(BenchError::Exists(path)),
        Ok(_) => Outcome::Overwritten,
        Err(_) => Outcome::Created,
    };
    if outcome != Outcome::Unchanged {
        write_atomic(&path, &bytes)?;
    }

    let manifest_path = out.join(MANIFEST_FILE);
    let mut manifest = if manifest_path.is_file() {
        Manifest::read(&manifest_path)?
    } else {
        Manifest::default()
    };
    manifest.upsert(ManifestEntry {
        name,
        path: file.into(),
        target: "target".into(),
        generator: describe(source),
        seed: Some(seed),
    });
    manifest.write(&manifest_path)?;
    Ok((path, outcome))
}
