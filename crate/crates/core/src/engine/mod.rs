//! The generational loop.
//!
//! Each generation: choose the active cases, evaluate the population on them,
//! record metrics, select `N` parents, vary them in pairs, and replace the
//! population wholesale (no elitism).

mod config;

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::data::{Dataset, SplitDataset};
use crate::downsample::{downsamplers, DownsampleContext, Downsampler};
use crate::error::Result;
use crate::expr::{
    ramped_half_and_half, subtree_crossover, subtree_mutation, Evaluator, ExprTree, PrimitiveSet,
};
use crate::metrics::{
    error_diversity_rounded, median_size, mse, squared_error, GenerationRecord, PhaseTimes,
};
use crate::registry::Registry;
use crate::rng::{stream, Stream, StreamRng};
use crate::selection::{selectors, ErrorMatrix, SelectionParams, Selector};

pub use config::{DataConfig, EvolutionParams, RunConfig, SelectionConfig};

/// Squared errors of every tree on every row of `data` (case ids `0..n`).
pub fn evaluate_population(pop: &[ExprTree], data: &Dataset) -> Result<ErrorMatrix> {
    let case_ids = (0..data.len()).collect();
    evaluate_with_ids(pop, data, case_ids)
}

fn evaluate_with_ids(
    pop: &[ExprTree],
    data: &Dataset,
    case_ids: Vec<usize>,
) -> Result<ErrorMatrix> {
    let rows = pop
        .par_iter()
        .map_init(Evaluator::new, |ev, tree| {
            let pred = ev.eval(tree, &data.x)?;
            Ok(pred
                .iter()
                .zip(&data.y)
                .map(|(&p, &y)| squared_error(p, y))
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    ErrorMatrix::new(pop.len(), case_ids, rows.concat())
}

/// Squared errors on the training rows listed in `cases`.
pub fn evaluate_on_cases(
    pop: &[ExprTree],
    train: &Dataset,
    cases: &[usize],
) -> Result<ErrorMatrix> {
    evaluate_with_ids(pop, &train.subset(cases), cases.to_vec())
}

/// Pairs consecutive parents for crossover, then mutates each offspring.
///
/// An odd trailing parent skips crossover but may still be mutated.
pub fn vary_population<R: Rng + ?Sized>(
    parents: &[ExprTree],
    params: &EvolutionParams,
    ps: &PrimitiveSet,
    rng: &mut R,
) -> Vec<ExprTree> {
    let mut out = Vec::with_capacity(parents.len());
    for pair in parents.chunks(2) {
        let mut kids: Vec<ExprTree> = match pair {
            [a, b] if rng.random::<f64>() < params.crossover_prob => {
                let (x, y) = subtree_crossover(a, b, params.max_depth, rng);
                vec![x, y]
            }
            _ => pair.to_vec(),
        };
        for kid in &mut kids {
            if rng.random::<f64>() < params.mutation_prob {
                *kid = subtree_mutation(kid, ps, params.max_depth, rng);
            }
        }
        out.extend(kids);
    }
    out
}

/// The generation's current best solution.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedBest {
    pub index: usize,
    pub genome: ExprTree,
    pub train_mse: f64,
    pub test_mse: f64,
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Picks the generation's best by MSE over all training cases.
///
/// With `full_eval` the whole population is evaluated on the full training
/// set. Otherwise the individual with the lowest sample MSE stands in. If
/// `sample` already covers every training case it is reused either way.
/// None of these evaluations count toward the budget.
pub fn track_best(
    pop: &[ExprTree],
    sample: &ErrorMatrix,
    data: &SplitDataset,
    full_eval: bool,
) -> Result<TrackedBest> {
    let covers_all = sample.case_ids().len() == data.train.len()
        && sample.case_ids().iter().enumerate().all(|(i, &c)| i == c);
    let index = if covers_all {
        argmin(&sample.row_means())
    } else if full_eval {
        argmin(&evaluate_population(pop, &data.train)?.row_means())
    } else {
        argmin(&sample.row_means())
    };
    let genome = pop[index].clone();
    let mut ev = Evaluator::new();
    let train_mse = mse(&ev.eval(&genome, &data.train.x)?, &data.train.y)?;
    let test_mse = mse(&ev.eval(&genome, &data.test.x)?, &data.test.y)?;
    Ok(TrackedBest {
        index,
        genome,
        train_mse,
        test_mse,
    })
}

/// Mutable state of one run.
pub struct Engine {
    params: EvolutionParams,
    diversity_decimals: Option<i32>,
    data: SplitDataset,
    primitives: PrimitiveSet,
    selector: Box<dyn Selector>,
    downsampler: Box<dyn Downsampler>,
    population: Vec<ExprTree>,
    generation: usize,
    evaluations: u64,
    refreshes: Vec<usize>,
    best: Option<TrackedBest>,
    downsample_rng: StreamRng,
    selection_rng: StreamRng,
    variation_rng: StreamRng,
}

impl Engine {
    /// Builds an engine with the built-in strategy registries.
    pub fn new(cfg: &RunConfig, data: SplitDataset) -> Result<Self> {
        Self::with_registries(cfg, data, &selectors(), &downsamplers())
    }

    pub fn with_registries(
        cfg: &RunConfig,
        data: SplitDataset,
        selection: &Registry<dyn Selector, SelectionParams>,
        downsampling: &Registry<dyn Downsampler, crate::downsample::DownsampleConfig>,
    ) -> Result<Self> {
        cfg.validate()?;
        let selector = selection.build(&cfg.selection.method, &cfg.selection.params())?;
        let downsampler = downsampling.build(&cfg.downsample.strategy, &cfg.downsample)?;
        let primitives = PrimitiveSet::standard(data.train.n_features());
        let population = ramped_half_and_half(
            cfg.run.pop_size,
            cfg.run.init_min_depth..=cfg.run.init_max_depth,
            &primitives,
            &mut stream(cfg.seed, Stream::Init),
        );
        Ok(Self {
            params: cfg.run.clone(),
            diversity_decimals: cfg.run.diversity_decimals,
            data,
            primitives,
            selector,
            downsampler,
            population,
            generation: 0,
            evaluations: 0,
            refreshes: Vec::new(),
            best: None,
            downsample_rng: stream(cfg.seed, Stream::Downsample),
            selection_rng: stream(cfg.seed, Stream::Selection),
            variation_rng: stream(cfg.seed, Stream::Variation),
        })
    }

    pub fn population(&self) -> &[ExprTree] {
        &self.population
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Core-loop fitness evaluations so far, including distance refreshes.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn data(&self) -> &SplitDataset {
        &self.data
    }

    pub fn best(&self) -> Option<&TrackedBest> {
        self.best.as_ref()
    }

    /// Generations at which the informed strategy rebuilt its distance matrix.
    pub fn refresh_generations(&self) -> &[usize] {
        &self.refreshes
    }

    /// Runs one generation and returns its record.
    pub fn step(&mut self) -> Result<GenerationRecord> {
        let mut times = PhaseTimes::default();
        let n = self.population.len();

        let t = Instant::now();
        let ctx = DownsampleContext {
            generation: self.generation,
            population: &self.population,
            train: &self.data.train,
        };
        let sample = self.downsampler.choose(&ctx, &mut self.downsample_rng)?;
        self.evaluations += sample.evaluations;
        if sample.refreshed {
            self.refreshes.push(self.generation);
        }
        times.downsample = t.elapsed();

        let t = Instant::now();
        let errors = evaluate_on_cases(&self.population, &self.data.train, &sample.cases)?;
        self.evaluations += (n * sample.cases.len()) as u64;
        times.evaluation = t.elapsed();

        let t = Instant::now();
        let best = track_best(
            &self.population,
            &errors,
            &self.data,
            self.params.full_eval_logging,
        )?;
        let record = GenerationRecord {
            gen: self.generation,
            best_train_mse: best.train_mse,
            best_test_mse: best.test_mse,
            generalization_gap: best.test_mse - best.train_mse,
            error_diversity: error_diversity_rounded(&errors, self.diversity_decimals),
            median_tree_size: median_size(&self.population),
            evaluations_cumulative: self.evaluations,
            phase_times: PhaseTimes::default(),
        };
        self.best = Some(best);
        times.logging = t.elapsed();

        let t = Instant::now();
        let picks = self.selector.select(&errors, n, &mut self.selection_rng);
        times.selection = t.elapsed();

        let t = Instant::now();
        let parents: Vec<ExprTree> = picks.iter().map(|&i| self.population[i].clone()).collect();
        self.population = vary_population(
            &parents,
            &self.params,
            &self.primitives,
            &mut self.variation_rng,
        );
        times.variation = t.elapsed();

        self.generation += 1;
        Ok(GenerationRecord {
            phase_times: times,
            ..record
        })
    }
}

/// Outcome of a complete run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub records: Vec<GenerationRecord>,
    /// Tracked best of the final generation.
    pub best: TrackedBest,
    pub evaluations: u64,
    pub refresh_generations: Vec<usize>,
    pub phase_times: PhaseTimes,
    pub wall_clock: Duration,
}

/// Generates the configured data, then runs.
pub fn run(cfg: &RunConfig) -> Result<RunResult> {
    let data = cfg.data.build(cfg.seed)?;
    run_on(cfg, data, |_, _| {})
}

/// Runs `cfg.run.generations` generations on `data`, calling
/// `progress(generation, best_train_mse)` after each one.
pub fn run_on(
    cfg: &RunConfig,
    data: SplitDataset,
    mut progress: impl FnMut(usize, f64),
) -> Result<RunResult> {
    let start = Instant::now();
    let mut engine = Engine::new(cfg, data)?;
    let mut records = Vec::with_capacity(cfg.run.generations);
    let mut phase_times = PhaseTimes::default();
    for _ in 0..cfg.run.generations {
        let rec = engine.step()?;
        phase_times += rec.phase_times;
        progress(rec.gen, rec.best_train_mse);
        records.push(rec);
    }
    Ok(RunResult {
        records,
        best: engine.best.clone().expect("at least one generation"),
        evaluations: engine.evaluations,
        refresh_generations: engine.refreshes.clone(),
        phase_times,
        wall_clock: start.elapsed(),
    })
}
