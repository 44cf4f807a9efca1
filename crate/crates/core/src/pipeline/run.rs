use std::io::Write;

use super::config::{Ablation, RunConfig};
use super::evaluate::{model_seed, repetition_seed, split_seed};
use super::extract::{prepare_samples, FeatureExtractor, FeatureParts};
use super::persist::Artifact;
use super::synth::{generate_synthetic, Sample, SyntheticDataset};
use super::train::{derive_seed, split_indices, train_model};
use crate::error::Result;
use crate::metrics::{confusion, median, metric_suite, MetricSuite};
use crate::objective::{model_error_objective, ModelLayout};
use crate::sujfo::{Benchmark, Mode, Optimizer, SwarmConfig};

/// Seed of the synthetic dataset for a config.
pub fn dataset_seed(config: &RunConfig) -> u64 {
    derive_seed(config.seed, 0xDA7A)
}

/// The dataset a config refers to: `data_dir` when set, otherwise the
/// synthetic generator.
pub fn load_dataset(config: &RunConfig) -> Result<SyntheticDataset> {
    match &config.dataset.data_dir {
        #[cfg(feature = "io")]
        Some(dir) => super::dataset_dir::read_dataset(dir),
        #[cfg(not(feature = "io"))]
        Some(_) => Err(crate::Error::config("reading data_dir needs the `io` feature")),
        None => generate_synthetic(&config.dataset, dataset_seed(config)),
    }
}

/// Result of [`train_artifact`].
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub artifact: Artifact,
    pub test_indices: Vec<usize>,
    pub held_out: MetricSuite,
}

/// Train the SU-JFO model on the repetition-0 split and score its held-out
/// part. `evaluate` reproduces this model as its first repetition.
pub fn train_artifact(
    config: &RunConfig,
    dataset: &SyntheticDataset,
    log: &(dyn Fn(&str) + Sync),
) -> Result<TrainOutcome> {
    config.validate()?;
    dataset.validate()?;
    let rep_seed = repetition_seed(config, 0);
    let (train_idx, test_idx) = split_indices(&dataset.labels(), config.split_percent, split_seed(rep_seed))?;
    let prepared = prepare_samples(&dataset.samples, &config.features)?;
    let pick = |idx: &[usize]| -> Vec<Sample> { idx.iter().map(|&i| prepared[i].clone()).collect() };
    let train = pick(&train_idx);
    let test = pick(&test_idx);
    log(&format!("train: {} training and {} held-out samples", train.len(), test.len()));
    let model = train_model(config, &train, Ablation::SuJfo, model_seed(rep_seed, Ablation::SuJfo))?;
    log(&format!(
        "train: {} weights, training mse {:.6}, {} iterations",
        model.layout.len(),
        model.training_error,
        model.trace.len().saturating_sub(1)
    ));
    let pred = model.predict(&test)?;
    let held_out = metric_suite(&confusion(&pred.fusion.decisions, &pred.labels)?)?;
    log(&format!("train: held-out accuracy {:.4}", held_out.accuracy));
    Ok(TrainOutcome { artifact: Artifact { config: config.clone(), model }, test_indices: test_idx, held_out })
}

/// Median best-fitness trace of one objective under one optimiser mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTrace {
    pub objective: String,
    pub mode: Mode,
    pub dimension: usize,
    /// Median over seeds of the best fitness at each iteration.
    pub median_best: Vec<f64>,
    pub final_best: Vec<f64>,
}

impl BenchmarkTrace {
    pub fn final_median(&self) -> f64 {
        median(&self.final_best)
    }
}

pub fn benchmark_seed(config: &RunConfig, index: usize) -> u64 {
    derive_seed(config.seed, 5000 + index as u64)
}

fn run_seeds<F>(objective: &F, swarm: &SwarmConfig, mode: Mode, dimension: usize, seeds: &[u64], lo_hi: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let runs = super::par_map(seeds, |&seed| {
        let cfg = SwarmConfig { seed, lower: lo_hi.0, upper: lo_hi.1, ..swarm.clone() };
        Optimizer::new(cfg, mode).run(objective, dimension)
    });
    let runs: Vec<_> = runs.into_iter().collect::<Result<_>>()?;
    let len = runs.iter().map(|r| r.trace.len()).min().unwrap_or(0);
    let median_best = (0..len)
        .map(|t| median(&runs.iter().map(|r| r.trace[t].best_fitness).collect::<Vec<_>>()))
        .collect();
    Ok((median_best, runs.iter().map(|r| r.best_fitness).collect()))
}

/// Run both optimiser modes on the standard test functions and on the
/// model-error objective of the repetition-0 training split.
pub fn benchmark_optimizer(
    config: &RunConfig,
    dataset: &SyntheticDataset,
    log: &(dyn Fn(&str) + Sync),
) -> Result<Vec<BenchmarkTrace>> {
    config.validate()?;
    let b = &config.benchmark;
    let seeds: Vec<u64> = (0..b.seeds).map(|i| benchmark_seed(config, i)).collect();
    let swarm = SwarmConfig { max_iterations: b.iterations, ..config.swarm.clone() };
    let mut out = Vec::new();
    for f in Benchmark::ALL {
        for mode in [Mode::SuJfo, Mode::Baseline] {
            let obj = |x: &[f64]| f.eval(x);
            let (median_best, final_best) = run_seeds(&obj, &swarm, mode, b.dimension, &seeds, f.bounds())?;
            let t = BenchmarkTrace { objective: f.name().into(), mode, dimension: b.dimension, median_best, final_best };
            log(&format!("benchmark {} {}: median final best {:.6e}", t.objective, mode.name(), t.final_median()));
            out.push(t);
        }
    }
    if b.model_seeds > 0 {
        dataset.validate()?;
        let rep_seed = repetition_seed(config, 0);
        let (train_idx, _) = split_indices(&dataset.labels(), config.split_percent, split_seed(rep_seed))?;
        let train = prepare_samples(&dataset.subset(&train_idx).samples, &config.features)?;
        let parts = FeatureParts::for_ablation(Ablation::SuJfo, &config.features);
        let extractor = FeatureExtractor::fit(&train, &config.features, parts)?;
        let set = extractor.labeled_set(&train)?;
        let layout = ModelLayout::new(extractor.dim(), config.model.hidden, &config.model.dbn_hidden);
        let reading = config.reading;
        let obj = |w: &[f64]| model_error_objective(w, &set, &layout, reading).unwrap_or(f64::INFINITY);
        let model_seeds: Vec<u64> = (0..b.model_seeds).map(|i| benchmark_seed(config, i)).collect();
        let swarm = config.swarm.clone();
        for mode in [Mode::SuJfo, Mode::Baseline] {
            let (median_best, final_best) =
                run_seeds(&obj, &swarm, mode, layout.len(), &model_seeds, (swarm.lower, swarm.upper))?;
            let t = BenchmarkTrace { objective: "model_error".into(), mode, dimension: layout.len(), median_best, final_best };
            log(&format!("benchmark model_error {}: median final best {:.6}", mode.name(), t.final_median()));
            out.push(t);
        }
    }
    Ok(out)
}

/// `objective,mode,dimension,iteration,median_best_fitness`
pub fn write_benchmark_csv(mut w: impl Write, traces: &[BenchmarkTrace]) -> Result<()> {
    writeln!(w, "objective,mode,dimension,iteration,median_best_fitness")?;
    for t in traces {
        for (i, v) in t.median_best.iter().enumerate() {
            writeln!(w, "{},{},{},{i},{v}", t.objective, t.mode.name(), t.dimension)?;
        }
    }
    Ok(())
}
