//! End-to-end harness: synthetic data, perturbations, training,
//! repeated evaluation and optimiser benchmarks.

mod config;
#[cfg(feature = "io")]
mod dataset_dir;
mod evaluate;
mod extract;
mod perturb;
mod persist;
mod run;
mod synth;
mod train;

pub use config::{Ablation, BenchmarkSpec, DatasetSpec, FeatureSpec, ModelSpec, RunConfig, Severities, TestCase};
pub use evaluate::{evaluate, model_seed, report_metric_names, repetition_seed, split_seed, EvaluationReport, MetricRow};
pub use extract::{preprocess_frame, prepare_samples, FeatureExtractor, FeatureParts};
#[cfg(feature = "io")]
pub use dataset_dir::{read_dataset, write_dataset};
pub use persist::Artifact;
pub use run::{
    benchmark_optimizer, benchmark_seed, dataset_seed, load_dataset, train_artifact, write_benchmark_csv, BenchmarkTrace,
    TrainOutcome,
};
pub use perturb::{apply_test_case, quantize, rotate_frame, rotation_matrix, warp_frame};
pub use synth::{generate_synthetic, Sample, SyntheticDataset};
pub use train::{derive_seed, split_indices, train_model, Prediction, TrainedModel};

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}
