use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Ablation, RunConfig, TestCase};
use super::extract::prepare_samples;
use super::perturb::apply_test_case;
use super::synth::{Sample, SyntheticDataset};
use super::train::{derive_seed, split_indices, train_model, TrainedModel};
use crate::error::Result;
use crate::metrics::{confusion, metric_suite, roc_curve, run_statistics, RocCurve, RunStatistics, METRIC_NAMES};
use crate::sujfo::TraceRow;

/// Metric rows reported per method and test case: the nine decision
/// metrics plus the area under the ROC curve.
pub fn report_metric_names() -> Vec<&'static str> {
    let mut v = METRIC_NAMES.to_vec();
    v.push("auc");
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: Ablation,
    pub test_case: TestCase,
    pub metric: String,
    pub stats: RunStatistics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<MetricRow>,
    /// ROC of the first repetition per method and test case.
    pub roc: Vec<(Ablation, TestCase, RocCurve)>,
    /// Convergence trace of the first repetition's optimised model.
    pub convergence: Vec<TraceRow>,
    /// Runs in which a fusion or metric guard fired.
    pub degenerate_runs: usize,
}

impl EvaluationReport {
    pub fn get(&self, method: Ablation, case: TestCase, metric: &str) -> Option<&RunStatistics> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.test_case == case && r.metric == metric)
            .map(|r| &r.stats)
    }

    pub fn write_metrics_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "method,test_case,metric,mean,maximum,std,median,minimum")?;
        for r in &self.rows {
            let s = &r.stats;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.method.name(),
                r.test_case.name(),
                r.metric,
                s.mean,
                s.maximum,
                s.std_deviation,
                s.median,
                s.minimum
            )?;
        }
        Ok(())
    }

    pub fn write_roc_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "method,test_case,fpr,tpr")?;
        for (m, c, roc) in &self.roc {
            for p in &roc.points {
                writeln!(w, "{},{},{},{}", m.name(), c.name(), p.0, p.1)?;
            }
        }
        Ok(())
    }
}

/// One repetition's outcome for one method and test case.
struct RunOutcome {
    method: Ablation,
    case: TestCase,
    values: Vec<f64>,
    roc: RocCurve,
    degenerate: bool,
}

struct Repetition {
    outcomes: Vec<RunOutcome>,
    trace: Vec<TraceRow>,
    lines: Vec<String>,
}

fn case_index(case: TestCase) -> u64 {
    TestCase::ALL.iter().position(|&c| c == case).unwrap() as u64
}

fn ablation_index(a: Ablation) -> u64 {
    Ablation::ALL.iter().position(|&c| c == a).unwrap() as u64
}

/// Seed of repetition `rep`; repetition 0 is the split and model `train` uses.
pub fn repetition_seed(config: &RunConfig, rep: usize) -> u64 {
    derive_seed(config.seed, 1000 + rep as u64)
}

pub fn model_seed(rep_seed: u64, ablation: Ablation) -> u64 {
    derive_seed(rep_seed, 100 + ablation_index(ablation))
}

pub fn split_seed(rep_seed: u64) -> u64 {
    derive_seed(rep_seed, 1)
}

fn run_repetition(
    config: &RunConfig,
    raw: &SyntheticDataset,
    prepared: &[Sample],
    rep: usize,
) -> Result<Repetition> {
    let rep_seed = repetition_seed(config, rep);
    let (train_idx, test_idx) = split_indices(&raw.labels(), config.split_percent, split_seed(rep_seed))?;
    let train: Vec<Sample> = train_idx.iter().map(|&i| prepared[i].clone()).collect();
    let raw_test = raw.subset(&test_idx);
    let mut test_sets: Vec<(TestCase, Vec<Sample>)> = Vec::new();
    for &case in &config.test_cases {
        let set = if case == TestCase::None {
            test_idx.iter().map(|&i| prepared[i].clone()).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(rep_seed, 10 + case_index(case)));
            let p = apply_test_case(&raw_test, case, config.severities.for_case(case), &mut rng)?;
            prepare_samples(&p.samples, &config.features)?
        };
        test_sets.push((case, set));
    }
    let mut outcomes = Vec::new();
    let mut trace = Vec::new();
    let mut lines = Vec::new();
    for &method in &config.ablations {
        let model: TrainedModel = train_model(config, &train, method, model_seed(rep_seed, method))?;
        if method == Ablation::SuJfo {
            trace = model.trace.clone();
        }
        for (case, set) in &test_sets {
            let pred = model.predict(set)?;
            let counts = confusion(&pred.fusion.decisions, &pred.labels)?;
            let suite = metric_suite(&counts)?;
            let roc = roc_curve(&pred.fusion.fused, &pred.labels)?;
            let mut values = suite.values().to_vec();
            values.push(roc.auc);
            lines.push(format!(
                "rep {rep} {} {}: accuracy {:.4} auc {:.4} train_mse {:.5}",
                method.name(),
                case.name(),
                suite.accuracy,
                roc.auc,
                model.training_error
            ));
            outcomes.push(RunOutcome {
                method,
                case: *case,
                values,
                roc,
                degenerate: pred.fusion.degenerate || suite.undefined,
            });
        }
    }
    Ok(Repetition { outcomes, trace, lines })
}

/// Repeat split, training and scoring `config.repetitions` times and
/// aggregate every metric per method and test case.
pub fn evaluate(
    config: &RunConfig,
    dataset: &SyntheticDataset,
    log: &(dyn Fn(&str) + Sync),
) -> Result<EvaluationReport> {
    config.validate()?;
    dataset.validate()?;
    let prepared = prepare_samples(&dataset.samples, &config.features)?;
    let reps: Vec<usize> = (0..config.repetitions).collect();
    let results: Vec<Repetition> = super::par_map(&reps, |&r| run_repetition(config, dataset, &prepared, r))
        .into_iter()
        .collect::<Result<_>>()?;

    let names = report_metric_names();
    let mut grouped: BTreeMap<(usize, usize), Vec<Vec<f64>>> = BTreeMap::new();
    let mut roc = Vec::new();
    let mut degenerate_runs = 0;
    for (r, rep) in results.iter().enumerate() {
        rep.lines.iter().for_each(|l| log(l));
        for o in &rep.outcomes {
            let key = (
                config.ablations.iter().position(|&a| a == o.method).unwrap(),
                config.test_cases.iter().position(|&c| c == o.case).unwrap(),
            );
            grouped.entry(key).or_default().push(o.values.clone());
            degenerate_runs += usize::from(o.degenerate);
            if r == 0 {
                roc.push((o.method, o.case, o.roc.clone()));
            }
        }
    }
    let mut rows = Vec::new();
    for ((a, c), runs) in grouped {
        for (k, name) in names.iter().enumerate() {
            let values: Vec<f64> = runs.iter().map(|v| v[k]).collect();
            rows.push(MetricRow {
                method: config.ablations[a],
                test_case: config.test_cases[c],
                metric: name.to_string(),
                stats: run_statistics(&values)?,
            });
        }
    }
    let convergence = results.first().map(|r| r.trace.clone()).unwrap_or_default();
    Ok(EvaluationReport { rows, roc, convergence, degenerate_runs })
}
