//! Improved score-level fusion of the Bi-GRU and DBN scores.
//!
//! Each score population is rescaled by a min-max range multiplied by a
//! per-sample local factor (the sample's deviation from the population
//! median relative to the mean deviation). The two rescaled scores are mixed
//! with a weight `C_v` derived from the target matrix and thresholded.
//!
//! Population statistics (min, max, median, mean deviation) and `C_v` are
//! fitted once on a training batch and then frozen in a [`FusionModel`];
//! test-time scores are normalised against the frozen statistics.
//!
//! Degenerate denominators never produce NaN: every ratio is guarded by
//! [`EPSILON`] and the affected outputs carry a flag.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagged::Flagged;
use crate::metrics::median;

pub const EPSILON: f64 = 1e-9;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// How the normalisation denominator combines the range and the local factor.
///
/// The printed formula reads `max - min * LF`; the default treats it as the
/// min-max range scaled by the local factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorReading {
    /// `(max - min) * LF`
    #[default]
    ScaledRange,
    /// `max - (min * LF)`
    Literal,
}

fn guard(d: f64) -> (f64, bool) {
    if d.abs() < EPSILON {
        let mag = d.abs() + EPSILON;
        (if d < 0.0 { -mag } else { mag }, true)
    } else {
        (d, false)
    }
}

fn check_scores(scores: &[f64]) -> Result<()> {
    if scores.len() < 2 {
        return Err(Error::domain("need at least two scores"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::domain("scores must be finite"));
    }
    Ok(())
}

/// Frozen statistics of one score population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreStats {
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// `mean(s - median)` over the population (signed).
    pub mean_deviation: f64,
}

impl ScoreStats {
    pub fn fit(scores: &[f64]) -> Result<Self> {
        check_scores(scores)?;
        let med = median(scores);
        let mean_deviation = scores.iter().map(|s| s - med).sum::<f64>() / scores.len() as f64;
        Ok(Self {
            min: scores.iter().copied().fold(f64::INFINITY, f64::min),
            max: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            median: med,
            mean_deviation,
        })
    }

    /// True when the mean deviation is too small to divide by; every local
    /// factor is then 1.
    pub fn flat_deviation(&self) -> bool {
        self.mean_deviation.abs() < EPSILON
    }

    pub fn constant(&self) -> bool {
        self.max == self.min
    }

    pub fn local_factor(&self, s: f64) -> f64 {
        if self.flat_deviation() {
            1.0
        } else {
            (s - self.median) / self.mean_deviation
        }
    }

    /// Improved normalisation of one score, clamped to `[0, 1]`. Returns the
    /// value and whether a guard fired.
    pub fn normalize(&self, s: f64, reading: DenominatorReading) -> (f64, bool) {
        if self.constant() {
            return (0.0, true);
        }
        let lf = self.local_factor(s);
        let den = match reading {
            DenominatorReading::ScaledRange => (self.max - self.min) * lf,
            DenominatorReading::Literal => self.max - self.min * lf,
        };
        let (den, fired) = guard(den);
        let v = ((s - self.min) / den).clamp(0.0, 1.0);
        (v, fired || self.flat_deviation())
    }
}

/// Per-sample local factors. A flat mean deviation yields all ones (flagged).
pub fn local_factor(scores: &[f64]) -> Result<Flagged<Vec<f64>>> {
    let stats = ScoreStats::fit(scores)?;
    let lf = scores.iter().map(|&s| stats.local_factor(s)).collect();
    Ok(Flagged::new(lf, stats.flat_deviation()))
}

/// Improved normalisation of a whole population against its own statistics.
pub fn improved_normalize(scores: &[f64]) -> Result<Flagged<Vec<f64>>> {
    improved_normalize_with(scores, DenominatorReading::default())
}

pub fn improved_normalize_with(
    scores: &[f64],
    reading: DenominatorReading,
) -> Result<Flagged<Vec<f64>>> {
    let stats = ScoreStats::fit(scores)?;
    let mut degenerate = stats.constant();
    let out = scores
        .iter()
        .map(|&s| {
            let (v, fired) = stats.normalize(s, reading);
            degenerate |= fired;
            v
        })
        .collect();
    Ok(Flagged::new(out, degenerate))
}

/// `(E_plus, E_minus)` over a target matrix: root of the summed squared
/// distances of each entry to its row maximum (`E_minus`) and row minimum
/// (`E_plus`).
pub fn error_terms<R: AsRef<[f64]>>(targets: &[R]) -> Result<(f64, f64)> {
    if targets.is_empty() {
        return Err(Error::domain("empty target matrix"));
    }
    let (mut plus, mut minus) = (0.0, 0.0);
    for row in targets {
        let row = row.as_ref();
        if row.is_empty() {
            return Err(Error::domain("empty target row"));
        }
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        for &t in row {
            minus += (hi - t).powi(2);
            plus += (lo - t).powi(2);
        }
    }
    Ok((plus.sqrt(), minus.sqrt()))
}

/// `C_v = E_minus / (E_plus + E_minus)`; 0.5 (flagged) when both are zero.
pub fn coefficient_cv(e_plus: f64, e_minus: f64) -> Flagged<f64> {
    let den = e_plus + e_minus;
    if den.abs() < EPSILON {
        Flagged::new(0.5, true)
    } else {
        Flagged::new((e_minus / den).clamp(0.0, 1.0), false)
    }
}

/// One-hot target row over `{real, fake}`.
pub fn one_hot(fake: bool) -> [f64; 2] {
    if fake {
        [0.0, 1.0]
    } else {
        [1.0, 0.0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBatch {
    pub bigru_scores: Vec<f64>,
    pub dbn_scores: Vec<f64>,
    pub targets: Vec<[f64; 2]>,
}

impl ScoreBatch {
    pub fn new(bigru_scores: Vec<f64>, dbn_scores: Vec<f64>, labels: &[bool]) -> Result<Self> {
        let batch = Self {
            bigru_scores,
            dbn_scores,
            targets: labels.iter().map(|&l| one_hot(l)).collect(),
        };
        batch.validate()?;
        Ok(batch)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.bigru_scores.len();
        if self.dbn_scores.len() != n || self.targets.len() != n {
            return Err(Error::domain("score batch columns differ in length"));
        }
        check_scores(&self.bigru_scores)?;
        check_scores(&self.dbn_scores)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionResult {
    pub sc_bigru: Vec<f64>,
    pub sc_dbn: Vec<f64>,
    pub cv: f64,
    pub fused: Vec<f64>,
    pub decisions: Vec<bool>,
    pub threshold: f64,
    /// Any guard fired while normalising or weighting.
    pub degenerate: bool,
}

impl FusionResult {
    /// CSV: sample id, raw scores, normalised scores, fused score, decision, label.
    pub fn write_csv<W: Write>(
        &self,
        mut w: W,
        raw_bigru: &[f64],
        raw_dbn: &[f64],
        labels: &[bool],
    ) -> Result<()> {
        writeln!(w, "sample,bigru_score,dbn_score,sc_bigru,sc_dbn,fused,decision,label")?;
        for i in 0..self.fused.len() {
            writeln!(
                w,
                "{i},{},{},{},{},{},{},{}",
                raw_bigru[i],
                raw_dbn[i],
                self.sc_bigru[i],
                self.sc_dbn[i],
                self.fused[i],
                u8::from(self.decisions[i]),
                u8::from(labels[i])
            )?;
        }
        Ok(())
    }
}

/// Fusion statistics fitted on a training batch and frozen for later batches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionModel {
    pub bigru: ScoreStats,
    pub dbn: ScoreStats,
    pub cv: f64,
    pub cv_degenerate: bool,
    pub threshold: f64,
    pub reading: DenominatorReading,
}

impl FusionModel {
    pub fn fit(batch: &ScoreBatch, threshold: f64, reading: DenominatorReading) -> Result<Self> {
        batch.validate()?;
        let (e_plus, e_minus) = error_terms(&batch.targets)?;
        let cv = coefficient_cv(e_plus, e_minus);
        Ok(Self {
            bigru: ScoreStats::fit(&batch.bigru_scores)?,
            dbn: ScoreStats::fit(&batch.dbn_scores)?,
            cv: cv.value,
            cv_degenerate: cv.degenerate,
            threshold,
            reading,
        })
    }

    /// Fused score of one sample against the frozen statistics.
    #[inline]
    pub fn fuse_one(&self, bigru: f64, dbn: f64) -> f64 {
        let (a, _) = self.bigru.normalize(bigru, self.reading);
        let (b, _) = self.dbn.normalize(dbn, self.reading);
        self.cv * a + (1.0 - self.cv) * b
    }

    pub fn apply(&self, bigru_scores: &[f64], dbn_scores: &[f64]) -> Result<FusionResult> {
        if bigru_scores.len() != dbn_scores.len() {
            return Err(Error::domain("score vectors differ in length"));
        }
        let mut degenerate = self.cv_degenerate;
        let mut norm = |stats: &ScoreStats, s: &[f64]| -> Vec<f64> {
            s.iter()
                .map(|&x| {
                    let (v, fired) = stats.normalize(x, self.reading);
                    degenerate |= fired;
                    v
                })
                .collect()
        };
        let sc_bigru = norm(&self.bigru, bigru_scores);
        let sc_dbn = norm(&self.dbn, dbn_scores);
        let fused: Vec<f64> = sc_bigru
            .iter()
            .zip(&sc_dbn)
            .map(|(a, b)| self.cv * a + (1.0 - self.cv) * b)
            .collect();
        let decisions = fused.iter().map(|&f| f >= self.threshold).collect();
        Ok(FusionResult {
            sc_bigru,
            sc_dbn,
            cv: self.cv,
            fused,
            decisions,
            threshold: self.threshold,
            degenerate,
        })
    }
}

/// Fit statistics on `batch` and fuse that same batch.
pub fn fuse(batch: &ScoreBatch, threshold: f64) -> Result<FusionResult> {
    let model = FusionModel::fit(batch, threshold, DenominatorReading::default())?;
    model.apply(&batch.bigru_scores, &batch.dbn_scores)
}

/// Mix two already-normalised scores.
pub fn fused_score(cv: f64, sc_bigru: f64, sc_dbn: f64) -> f64 {
    cv * sc_bigru + (1.0 - cv) * sc_dbn
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn local_factor_cases() {
        // median 0.5 and mean deviation 0: guard, all ones
        let lf = local_factor(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(lf.value, vec![1.0; 3]);
        assert!(lf.degenerate);
        // median 0, mean deviation 1/3
        let lf = local_factor(&[0.0, 0.0, 1.0]).unwrap();
        assert!(!lf.degenerate);
        assert!(close(lf.value[0], 0.0) && close(lf.value[1], 0.0) && close(lf.value[2], 3.0));
        let lf = local_factor(&[0.7; 4]).unwrap();
        assert_eq!(lf.value, vec![1.0; 4]);
        assert!(lf.degenerate);
        assert!(local_factor(&[1.0]).is_err());
    }

    #[test]
    fn improved_normalize_cases() {
        let n = improved_normalize(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(n.value[0], 0.0);
        assert_eq!(n.value[1], 0.0);
        assert!(close(n.value[2], 1.0 / 3.0));
        // flat deviation: plain min-max
        let n = improved_normalize(&[2.0, 3.0, 4.0]).unwrap();
        assert_eq!(n.value, vec![0.0, 0.5, 1.0]);
        let n = improved_normalize(&[5.0, 5.0]).unwrap();
        assert_eq!(n.value, vec![0.0, 0.0]);
        assert!(n.degenerate);
    }

    #[test]
    fn literal_reading_differs() {
        // [0, 0, 1] with min 0: max - 0 * LF = 1
        let n = improved_normalize_with(&[0.0, 0.0, 1.0], DenominatorReading::Literal).unwrap();
        assert_eq!(n.value, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn error_term_cases() {
        assert_eq!(error_terms(&[[1.0, 0.0]]).unwrap(), (1.0, 1.0));
        let rows = vec![[0.0, 1.0]; 9];
        let (p, m) = error_terms(&rows).unwrap();
        assert!(close(p, 3.0) && close(m, 3.0));
        assert_eq!(error_terms(&[[0.0, 0.0]; 3]).unwrap(), (0.0, 0.0));
        assert!(error_terms::<[f64; 2]>(&[]).is_err());
    }

    #[test]
    fn cv_cases() {
        assert_eq!(coefficient_cv(2.0, 2.0).value, 0.5);
        assert_eq!(coefficient_cv(2.0, 0.0).value, 0.0);
        let c = coefficient_cv(0.0, 0.0);
        assert_eq!(c.value, 0.5);
        assert!(c.degenerate);
    }

    #[test]
    fn fused_score_examples() {
        assert_eq!(fused_score(1.0, 0.3, 0.9), 0.3);
        assert_eq!(fused_score(0.0, 0.3, 0.9), 0.9);
        assert!(close(fused_score(0.25, 0.2, 0.8), 0.65));
    }

    #[test]
    fn fuse_batch() {
        let labels = [false, false, true, true];
        let batch = ScoreBatch::new(vec![0.1, 0.2, 0.3, 0.9], vec![0.2, 0.1, 0.8, 0.9], &labels)
            .unwrap();
        let r = fuse(&batch, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.cv, 0.5);
        for i in 0..4 {
            let lo = r.sc_bigru[i].min(r.sc_dbn[i]);
            let hi = r.sc_bigru[i].max(r.sc_dbn[i]);
            assert!(r.fused[i] >= lo - 1e-15 && r.fused[i] <= hi + 1e-15);
            assert_eq!(r.decisions[i], r.fused[i] >= 0.5);
        }
        let mut csv = Vec::new();
        r.write_csv(&mut csv, &batch.bigru_scores, &batch.dbn_scores, &labels).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("sample,bigru_score"));
    }

    #[test]
    fn batch_validation() {
        assert!(ScoreBatch::new(vec![0.1, 0.2], vec![0.1], &[true, false]).is_err());
        assert!(ScoreBatch::new(vec![0.1, f64::NAN], vec![0.1, 0.2], &[true, false]).is_err());
    }
}
