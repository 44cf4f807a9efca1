use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Ablation, RunConfig};
use super::extract::{FeatureExtractor, FeatureParts};
use super::synth::Sample;
use crate::bigru::BiGruModel;
use crate::dbn::{dbn_pretrain, DbnModel};
use crate::error::{Error, Result};
use crate::fusion::{FusionModel, FusionResult, ScoreBatch};
use crate::objective::{fused_mse, model_error_objective, score_set, ModelLayout};
use crate::sujfo::{initialize, Bounds, Optimizer, TraceRow};

/// SplitMix64 step, used to derive independent seeds from a master seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stratified split: each class is shuffled and `percent` of it (at least
/// one sample, leaving at least one) goes to training. Both index lists
/// are sorted.
pub fn split_indices(labels: &[bool], percent: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(percent > 0.0 && percent < 100.0) {
        return Err(Error::domain("split percent must lie in (0, 100)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < 2 {
            return Err(Error::Refused(format!(
                "class {} has {} samples; a split needs at least 2",
                u8::from(class),
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        let k = ((idx.len() as f64 * percent / 100.0).round() as usize).clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub ablation: Ablation,
    pub extractor: FeatureExtractor,
    pub layout: ModelLayout,
    pub bigru: BiGruModel,
    pub dbn: DbnModel,
    pub fusion: FusionModel,
    pub trace: Vec<TraceRow>,
    /// Objective value of the returned weights on the training set.
    pub training_error: f64,
}

/// Scores, fused output and labels of a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub bigru_scores: Vec<f64>,
    pub dbn_scores: Vec<f64>,
    pub fusion: FusionResult,
    pub labels: Vec<bool>,
}

impl TrainedModel {
    pub fn weights(&self) -> Vec<f64> {
        self.layout.join(&self.bigru, &self.dbn)
    }

    /// Score prepared samples against the frozen fusion statistics.
    pub fn predict(&self, samples: &[Sample]) -> Result<Prediction> {
        let set = self.extractor.labeled_set(samples)?;
        let (a, b) = score_set(&self.bigru, &self.dbn, &set)?;
        let fusion = self.fusion.apply(&a, &b)?;
        Ok(Prediction { bigru_scores: a, dbn_scores: b, fusion, labels: set.labels })
    }
}

/// Fit features, pretrain the DBN, tune `[W1 | W2]` with the optimiser and
/// freeze the fusion statistics. `samples` must be prepared.
pub fn train_model(
    config: &RunConfig,
    samples: &[Sample],
    ablation: Ablation,
    seed: u64,
) -> Result<TrainedModel> {
    let real = samples.iter().filter(|s| !s.fake).count();
    if real == 0 || real == samples.len() {
        return Err(Error::domain("training data needs both classes"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = FeatureParts::for_ablation(ablation, &config.features);
    let extractor = FeatureExtractor::fit(samples, &config.features, parts)?;
    let set = extractor.labeled_set(samples)?;
    let layout = ModelLayout::new(extractor.dim(), config.model.hidden, &config.model.dbn_hidden);

    let pretrained = dbn_pretrain(&layout.dbn, &set.summaries, &config.pretrain, &mut rng)?;
    let swarm_cfg = crate::sujfo::SwarmConfig { seed: rng.next_u64(), ..config.swarm.clone() };
    let (lo, hi) = (swarm_cfg.lower, swarm_cfg.upper);
    // one candidate starts from the pretrained DBN, clamped into the box
    let mut start: Vec<f64> = (0..layout.w1_len()).map(|_| rng.random_range(lo..=hi)).collect();
    start.extend(pretrained.flatten().into_iter().map(|w| w.clamp(lo, hi)));

    let reading = config.reading;
    let objective = |w: &[f64]| model_error_objective(w, &set, &layout, reading).unwrap_or(f64::INFINITY);
    let (best, trace) = if ablation == Ablation::NoOptimization {
        let swarm = initialize(&objective, &swarm_cfg, Bounds::uniform(layout.len(), lo, hi), &[start])?;
        let row = TraceRow { iteration: 0, best_fitness: swarm.best_fitness, mean_fitness: swarm.mean_fitness() };
        (swarm.best_position, vec![row])
    } else {
        let result = Optimizer::new(swarm_cfg, config.mode)
            .with_seeds(vec![start])
            .run(&objective, layout.len())?;
        (result.best_position, result.trace)
    };
    let (bigru, dbn) = layout.split(&best)?;
    let (a, b) = score_set(&bigru, &dbn, &set)?;
    let batch = ScoreBatch::new(a, b, &set.labels)?;
    let fusion = FusionModel::fit(&batch, config.threshold, reading)?;
    let fused = fusion.apply(&batch.bigru_scores, &batch.dbn_scores)?.fused;
    let training_error = fused_mse(&fused, &set.labels);
    Ok(TrainedModel { ablation, extractor, layout, bigru, dbn, fusion, trace, training_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_disjoint_exhaustive_and_stratified() {
        let labels: Vec<bool> = (0..20).map(|i| i % 3 == 0).collect();
        let (tr, te) = split_indices(&labels, 70.0, 4).unwrap();
        let mut all: Vec<usize> = tr.iter().chain(&te).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..20).collect::<Vec<_>>());
        assert!(tr.iter().any(|&i| labels[i]) && te.iter().any(|&i| labels[i]));
        assert_eq!(split_indices(&labels, 70.0, 4).unwrap(), (tr, te));
        assert!(matches!(split_indices(&[true, false, false], 50.0, 1), Err(Error::Refused(_))));
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(9, 9), derive_seed(9, 9));
    }
}
