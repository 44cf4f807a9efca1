//! Plain-Rust logic behind the browser bindings.

use jellyfuse::activation::ActivationKind;
use jellyfuse::fusion::{DenominatorReading, FusionModel, FusionResult, ScoreBatch};
use jellyfuse::sujfo::{Benchmark, Mode, Optimizer, SwarmConfig};
use jellyfuse::{Error, Result};

pub fn parse_activation(name: &str) -> Result<ActivationKind> {
    ActivationKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| Error::Domain(format!("unknown activation `{name}`")))
}

pub fn parse_benchmark(name: &str) -> Result<Benchmark> {
    Benchmark::ALL
        .into_iter()
        .find(|b| b.name() == name)
        .ok_or_else(|| Error::Domain(format!("unknown benchmark `{name}`")))
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain("grid needs n >= 2 and finite lo < hi".into()));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

pub fn activation_values(kind: ActivationKind, xs: &[f64], derivative: bool) -> Vec<f64> {
    xs.iter().map(|&x| if derivative { kind.derivative(x) } else { kind.eval(x) }).collect()
}

/// Best-fitness traces of SU-JFO and the baseline from the same seed.
pub fn convergence_pair(
    bench: Benchmark,
    dimension: usize,
    population: usize,
    iterations: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lower, upper) = bench.bounds();
    let cfg = SwarmConfig { population, max_iterations: iterations, seed, lower, upper, ..SwarmConfig::default() };
    let objective = |x: &[f64]| bench.eval(x);
    let mut traces = [Mode::SuJfo, Mode::Baseline].into_iter().map(|mode| {
        Optimizer::new(cfg.clone(), mode)
            .run(&objective, dimension)
            .map(|r| r.trace.iter().map(|t| t.best_fitness).collect::<Vec<_>>())
    });
    let su = traces.next().unwrap()?;
    let base = traces.next().unwrap()?;
    Ok((su, base))
}

/// Fit fusion statistics on a batch and apply them to the same batch.
pub fn fuse_batch(bigru: &[f64], dbn: &[f64], labels: &[bool], threshold: f64, literal: bool) -> Result<FusionResult> {
    let batch = ScoreBatch::new(bigru.to_vec(), dbn.to_vec(), labels)?;
    let reading = if literal { DenominatorReading::Literal } else { DenominatorReading::ScaledRange };
    FusionModel::fit(&batch, threshold, reading)?.apply(bigru, dbn)
}
