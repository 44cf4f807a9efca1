//! Training error of the hybrid model as a function of its flat weights.

use serde::{Deserialize, Serialize};

use crate::bigru::{BiGruModel, GruDims};
use crate::dbn::{self, DbnModel};
use crate::error::{Error, Result};
use crate::fusion::{DenominatorReading, FusionModel, ScoreBatch, DEFAULT_THRESHOLD};

/// How a flat weight vector `[W1 | W2]` splits into the two scorers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelLayout {
    pub gru: GruDims,
    /// DBN layer sizes, visible first.
    pub dbn: Vec<usize>,
}

impl ModelLayout {
    pub fn new(input: usize, hidden: usize, dbn_hidden: &[usize]) -> Self {
        let mut dbn = vec![input];
        dbn.extend_from_slice(dbn_hidden);
        Self { gru: GruDims { input, hidden }, dbn }
    }

    pub fn w1_len(&self) -> usize {
        self.gru.param_count()
    }

    pub fn w2_len(&self) -> usize {
        dbn::param_count(&self.dbn)
    }

    pub fn len(&self) -> usize {
        self.w1_len() + self.w2_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn split(&self, flat: &[f64]) -> Result<(BiGruModel, DbnModel)> {
        if flat.len() != self.len() {
            return Err(Error::domain(format!(
                "weight vector has {} entries, layout needs {} + {}",
                flat.len(),
                self.w1_len(),
                self.w2_len()
            )));
        }
        let (w1, w2) = flat.split_at(self.w1_len());
        Ok((BiGruModel::unflatten(w1, self.gru)?, DbnModel::unflatten(w2, &self.dbn)?))
    }

    pub fn join(&self, bigru: &BiGruModel, dbn: &DbnModel) -> Vec<f64> {
        let mut v = bigru.flatten();
        v.extend(dbn.flatten());
        v
    }
}

/// Per-sample inputs of both scorers: the frame-feature sequence for the
/// Bi-GRU and a single summary vector for the DBN.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LabeledSet {
    pub sequences: Vec<Vec<Vec<f64>>>,
    pub summaries: Vec<Vec<f64>>,
    /// `true` = fake.
    pub labels: Vec<bool>,
}

impl LabeledSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Raw scores of both models on every sample.
pub fn score_set(bigru: &BiGruModel, dbn: &DbnModel, data: &LabeledSet) -> Result<(Vec<f64>, Vec<f64>)> {
    let a = data.sequences.iter().map(|s| bigru.score(s)).collect::<Result<Vec<_>>>()?;
    let b = data.summaries.iter().map(|x| dbn.forward(x)).collect::<Result<Vec<_>>>()?;
    Ok((a, b))
}

/// Mean squared error between fused score and label, with the fusion
/// statistics fitted on `data` itself.
pub fn model_error_objective(
    flat: &[f64],
    data: &LabeledSet,
    layout: &ModelLayout,
    reading: DenominatorReading,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::domain("empty training set"));
    }
    let (bigru, dbn) = layout.split(flat)?;
    let (a, b) = score_set(&bigru, &dbn, data)?;
    let batch = ScoreBatch::new(a, b, &data.labels)?;
    let fusion = FusionModel::fit(&batch, DEFAULT_THRESHOLD, reading)?;
    let fused = fusion.apply(&batch.bigru_scores, &batch.dbn_scores)?.fused;
    Ok(fused_mse(&fused, &data.labels))
}

pub fn fused_mse(fused: &[f64], labels: &[bool]) -> f64 {
    let sum: f64 = fused
        .iter()
        .zip(labels)
        .map(|(f, &l)| (f - if l { 1.0 } else { 0.0 }).powi(2))
        .sum();
    sum / fused.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> (ModelLayout, LabeledSet) {
        let layout = ModelLayout::new(2, 2, &[3]);
        let data = LabeledSet {
            sequences: vec![vec![vec![0.1, 0.2]; 3], vec![vec![0.9, 0.8]; 3]],
            summaries: vec![vec![0.1, 0.2], vec![0.9, 0.8]],
            labels: vec![false, true],
        };
        (layout, data)
    }

    #[test]
    fn layout_roundtrip() {
        let (layout, _) = tiny();
        let flat: Vec<f64> = (0..layout.len()).map(|i| i as f64 * 0.01).collect();
        let (g, d) = layout.split(&flat).unwrap();
        assert_eq!(layout.join(&g, &d), flat);
        assert!(layout.split(&flat[1..]).is_err());
    }

    #[test]
    fn mse_cases() {
        assert_eq!(fused_mse(&[0.0, 1.0], &[false, true]), 0.0);
        assert_eq!(fused_mse(&[0.5, 0.5], &[false, true]), 0.25);
    }

    #[test]
    fn objective_in_unit_interval() {
        let (layout, data) = tiny();
        for k in 0..5 {
            let flat: Vec<f64> = (0..layout.len()).map(|i| ((i * 7 + k) % 11) as f64 / 10.0).collect();
            let e = model_error_objective(&flat, &data, &layout, DenominatorReading::default()).unwrap();
            assert!((0.0..=1.0).contains(&e));
        }
        // zero weights give identical scores on both samples: constant batch, zero SCs
        let e = model_error_objective(&vec![0.0; layout.len()], &data, &layout, DenominatorReading::default())
            .unwrap();
        assert!((e - 0.5).abs() < 1e-12);
    }
}
