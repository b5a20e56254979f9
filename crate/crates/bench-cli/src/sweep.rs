//! Runs every job of an experiment spec into a results tree.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{BenchError, Result};
use crate::results::{execute, RunFiles};
use crate::spec::{ExperimentSpec, RunJob};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepReport {
    pub total: usize,
    pub completed: usize,
    /// Runs whose results were already on disk.
    pub skipped: usize,
    /// `(cell key, run index, message)` of each failed run.
    pub failed: Vec<(String, usize, String)>,
}

pub fn job_files(root: &Path, job: &RunJob) -> RunFiles {
    RunFiles::new(&job.cell.dir(root), &job.stem())
}

/// Executes the jobs not yet completed under `root`.
///
/// `parallel` bounds the number of concurrent runs; `None` uses every core.
/// A failing run is recorded in its error file and the sweep continues.
pub fn run_sweep(
    spec: &ExperimentSpec,
    root: &Path,
    parallel: Option<usize>,
    on_done: impl Fn(&RunJob, &Result<()>) + Sync,
) -> Result<SweepReport> {
    let jobs = spec.jobs()?;
    let (done, todo): (Vec<_>, Vec<_>) =
        jobs.iter().partition(|j| job_files(root, j).is_complete());
    let completed = AtomicUsize::new(0);

    let work = || {
        todo.par_iter()
            .filter_map(|job| {
                let files = job_files(root, job);
                let outcome = execute(&job.config, &files, |_, _| {}).map(|_| ());
                on_done(job, &outcome);
                match outcome {
                    Ok(()) => {
                        completed.fetch_add(1, Ordering::Relaxed);
                        None
                    }
                    Err(e) => Some((job.cell.key(), job.index, e.to_string())),
                }
            })
            .collect::<Vec<_>>()
    };
    let mut failed = match parallel {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| BenchError::Pool(e.to_string()))?
            .install(work),
        None => work(),
    };
    failed.sort();
    Ok(SweepReport {
        total: jobs.len(),
        completed: completed.into_inner(),
        skipped: done.len(),
        failed,
    })
}
