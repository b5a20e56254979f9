//! Dataset manifest: a CSV listing `name, path, target, generator, seed`.
//!
//! Paths are stored relative to the manifest's own directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub path: PathBuf,
    pub target: String,
    pub generator: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let entries = r
            .deserialize()
            .collect::<std::result::Result<Vec<ManifestEntry>, _>>()?;
        Ok(Self { entries })
    }

    /// Writes entries sorted by name.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| a.name.cmp(&b.name));
        let mut w = csv::Writer::from_path(path)?;
        for e in &entries {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Adds `entry`, replacing any entry with the same name.
    pub fn upsert(&mut self, entry: ManifestEntry) {
        self.entries.retain(|e| e.name != entry.name);
        self.entries.push(entry);
    }

    pub fn get(&self, name: &str) -> Result<&ManifestEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Config(format!("dataset `{name}` not in manifest")))
    }
}
