use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] dsgp_core::Error),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error("{path}: results written with schema version {found}, expected {expected}")]
    Schema {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("no completed runs under {0}")]
    NoResults(PathBuf),

    #[error("mixed schema versions in results: {0}")]
    MixedSchema(String),

    #[error("{0} already exists with different contents (use --force to overwrite)")]
    Exists(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot start worker pool: {0}")]
    Pool(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: &std::path::Path) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: &std::path::Path) -> Result<T> {
        self.map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
