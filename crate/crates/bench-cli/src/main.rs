use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dsgp_bench::aggregate::aggregate;
use dsgp_bench::config::{load_run_config, noise_label, problem_label};
use dsgp_bench::gendata::{gen_data, Outcome};
use dsgp_bench::plot::{plot, PlotKind};
use dsgp_bench::results::{execute, RunFiles};
use dsgp_bench::spec::ExperimentSpec;
use dsgp_bench::sweep::run_sweep;
use dsgp_core::data::DatasetSource;

/// Symbolic-regression GP with pluggable selection and down-sampling.
#[derive(Parser)]
#[command(name = "dsgp", version)]
struct Cli {
    /// Output root for data, results, and figures.
    #[arg(long, global = true, env = "DSGP_OUT", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV and record it in manifest.csv.
    GenData(GenDataArgs),
    /// Execute one run from a config file.
    Run(RunArgs),
    /// Execute every run of an experiment spec, skipping completed ones.
    Sweep(SweepArgs),
    /// Summarize a results tree into summary.csv, comparisons.csv, summary.json.
    Aggregate(AggregateArgs),
    /// Draw SVG box plots or series plots from a results tree.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long, value_parser = ["friedman1", "friedman2", "friedman3"], default_value = "friedman1")]
    generator: String,
    /// Input columns (friedman1 only).
    #[arg(long)]
    features: Option<usize>,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// File stem and manifest name; defaults to the generator label.
    #[arg(long)]
    name: Option<String>,
    /// Overwrite a differing existing file.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Replaces the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Concurrent runs; defaults to the number of cores.
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Args)]
struct AggregateArgs {
    /// Results tree; defaults to `<out>/results`.
    results: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Box,
    Series,
}

#[derive(Args)]
struct PlotArgs {
    /// Results tree (the directory `aggregate` summarized); defaults to `<out>/results`.
    results: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "box")]
    kind: Kind,
    /// Only this problem label.
    #[arg(long)]
    problem: Option<String>,
}

fn results_dir(out: &Path, given: Option<PathBuf>) -> PathBuf {
    given.unwrap_or_else(|| out.join("results"))
}

fn cmd_gen_data(out: &Path, a: GenDataArgs) -> Result<()> {
    let source = match a.generator.as_str() {
        "friedman1" => DatasetSource::Friedman1 {
            features: a.features.unwrap_or(10),
            instances: a.instances,
        },
        _ if a.features.is_some() => bail!("--features applies to friedman1 only"),
        "friedman2" => DatasetSource::Friedman2 {
            instances: a.instances,
        },
        _ => DatasetSource::Friedman3 {
            instances: a.instances,
        },
    };
    let dir = out.join("data");
    let (path, outcome) = gen_data(&source, a.seed, &dir, a.name.as_deref(), a.force)?;
    let verb = match outcome {
        Outcome::Created => "wrote",
        Outcome::Unchanged => "unchanged",
        Outcome::Overwritten => "overwrote",
    };
    println!("{verb} {}", path.display());
    Ok(())
}

fn cmd_run(out: &Path, a: RunArgs) -> Result<()> {
    let mut cfg = load_run_config(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let dir = out
        .join("runs")
        .join(problem_label(&cfg.data)?)
        .join(noise_label(cfg.data.noise))
        .join(format!(
            "{}-{}",
            cfg.selection.method, cfg.downsample.strategy
        ));
    let files = RunFiles::new(&dir, &format!("seed-{}", cfg.seed));
    let every = (cfg.run.generations / 10).max(1);
    let summary = execute(&cfg, &files, |gen, mse| {
        if gen % every == 0 {
            eprintln!("gen {gen:>6}  best train MSE {mse:.6}");
        }
    })
    .with_context(|| format!("run from {} failed", a.config.display()))?;
    println!(
        "test MSE {:.6}  gap {:.6}  evaluations {}  best {}",
        summary.final_metrics.best_test_mse,
        summary.final_metrics.generalization_gap,
        summary.evaluations,
        summary.best_expression
    );
    println!("{}\n{}", files.csv.display(), files.json.display());
    Ok(())
}

fn cmd_sweep(out: &Path, a: SweepArgs) -> Result<ExitCode> {
    let spec = ExperimentSpec::load(&a.spec)?;
    let root = out.join("results");
    let report = run_sweep(&spec, &root, a.parallel, |job, outcome| match outcome {
        Ok(()) => eprintln!("done   {} run {}", job.cell.key(), job.index),
        Err(e) => eprintln!("FAILED {} run {}: {e}", job.cell.key(), job.index),
    })?;
    println!(
        "{} runs: {} completed, {} already present, {} failed -> {}",
        report.total,
        report.completed,
        report.skipped,
        report.failed.len(),
        root.display()
    );
    if report.failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for (key, index, message) in &report.failed {
            eprintln!("  {key} run {index}: {message}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_aggregate(out: &Path, a: AggregateArgs) -> Result<()> {
    let root = results_dir(out, a.results);
    let table = aggregate(&root, &root)?;
    let incomplete: usize = table.cells.iter().map(|c| c.incomplete).sum();
    println!(
        "{} cells, {} comparisons -> {}",
        table.cells.len(),
        table.comparisons.len(),
        root.join("summary.csv").display()
    );
    if incomplete > 0 {
        println!("{incomplete} incomplete runs are counted in the `incomplete` column");
    }
    Ok(())
}

fn cmd_plot(out: &Path, a: PlotArgs) -> Result<()> {
    let root = results_dir(out, a.results);
    let kind = match a.kind {
        Kind::Box => PlotKind::Box,
        Kind::Series => PlotKind::Series,
    };
    let written = plot(&root, &out.join("plots"), kind, a.problem.as_deref())?;
    if written.is_empty() {
        println!("nothing to plot: no completed runs match");
    }
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let out = cli.out;
    match cli.command {
        Command::GenData(a) => cmd_gen_data(&out, a)?,
        Command::Run(a) => cmd_run(&out, a)?,
        Command::Sweep(a) => return cmd_sweep(&out, a),
        Command::Aggregate(a) => cmd_aggregate(&out, a)?,
        Command::Plot(a) => cmd_plot(&out, a)?,
    }
    Ok(ExitCode::SUCCESS)
}
