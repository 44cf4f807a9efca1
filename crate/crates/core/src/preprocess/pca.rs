use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagged::Flagged;

/// Mean, orthonormal principal directions (one per row) and their sample
/// variances, sorted by descending variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn project(&self, sample: &[f64]) -> Result<Vec<f64>> {
        pca_project(self, sample)
    }

    /// `mean + sum_i coeff_i * component_i`.
    pub fn reconstruct(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.k() {
            return Err(Error::domain(format!(
                "expected {} coefficients, got {}",
                self.k(),
                coeffs.len()
            )));
        }
        let mut out = self.mean.clone();
        for (c, comp) in coeffs.iter().zip(&self.components) {
            for (o, v) in out.iter_mut().zip(comp) {
                *o += c * v;
            }
        }
        Ok(out)
    }
}

/// Principal components from the thin SVD of the centred sample matrix.
/// Requests beyond the numerical rank are truncated and flagged. Each
/// component's sign is fixed so its largest-magnitude entry is positive.
pub fn pca_fit(samples: &[Vec<f64>], k: usize) -> Result<Flagged<PcaModel>> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::domain("PCA needs at least 2 samples"));
    }
    if k == 0 {
        return Err(Error::domain("PCA needs k >= 1"));
    }
    let d = samples[0].len();
    if d == 0 || samples.iter().any(|s| s.len() != d) {
        return Err(Error::domain("PCA samples must share a non-zero dimension"));
    }
    if samples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::domain("PCA samples must be finite"));
    }
    let mut mean = vec![0.0; d];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let x = DMatrix::from_fn(n, d, |i, j| samples[i][j] - mean[j]);
    let svd = x.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let top = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let tol = top * (n.max(d) as f64) * f64::EPSILON;
    let rank = order.iter().filter(|&&i| svd.singular_values[i] > tol).count();
    let kept = k.min(rank);
    let mut components = Vec::with_capacity(kept);
    let mut explained_variance = Vec::with_capacity(kept);
    for &i in order.iter().take(kept) {
        let mut c: Vec<f64> = v_t.row(i).iter().copied().collect();
        let pivot = c.iter().copied().fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if pivot < 0.0 {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(c);
        let s = svd.singular_values[i];
        explained_variance.push(s * s / (n - 1) as f64);
    }
    Ok(Flagged::new(PcaModel { mean, components, explained_variance }, kept < k))
}

/// `components * (sample - mean)`.
pub fn pca_project(model: &PcaModel, sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() != model.dim() {
        return Err(Error::domain(format!(
            "sample dimension {} does not match PCA dimension {}",
            sample.len(),
            model.dim()
        )));
    }
    Ok(model
        .components
        .iter()
        .map(|c| c.iter().zip(sample).zip(&model.mean).map(|((c, s), m)| c * (s - m)).sum())
        .collect())
}
