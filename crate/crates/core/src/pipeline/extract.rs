use serde::{Deserialize, Serialize};

use super::config::{Ablation, FeatureSpec};
use super::par_map;
use super::synth::Sample;
use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::objective::LabeledSet;
use crate::preprocess::{
    build_feature_vector, crop_patch, ear_attributes, gaussian_blur, pca_fit, pooled_ear_embedding,
    resize, to_grayscale, EarRegion, FeatureVector, FrameBuffer, PcaModel,
};

/// Which feature groups feed the models, and the embedding nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureParts {
    pub embedding: bool,
    pub attributes: bool,
    pub appearance: bool,
    pub activation: ActivationKind,
}

impl FeatureParts {
    pub fn for_ablation(ablation: Ablation, spec: &FeatureSpec) -> Self {
        let appearance = spec.pca_components > 0;
        match ablation {
            Ablation::EarFeaturesOnly => Self {
                embedding: false,
                attributes: true,
                appearance: false,
                activation: ActivationKind::HyperSig,
            },
            Ablation::ConventionalActivation => Self {
                embedding: true,
                attributes: true,
                appearance,
                activation: ActivationKind::LogisticSigmoid,
            },
            Ablation::SuJfo | Ablation::NoOptimization => Self {
                embedding: true,
                attributes: true,
                appearance,
                activation: ActivationKind::HyperSig,
            },
        }
    }
}

/// Per-frame features before PCA: embedding, attributes, ear patch.
struct RawFrame {
    embedding: Vec<f64>,
    attributes: Vec<f64>,
    patch: Vec<f64>,
}

/// Resize, min-max normalise, grayscale and blur; the region is rescaled
/// into the new frame.
pub fn preprocess_frame(
    frame: &FrameBuffer,
    region: &EarRegion,
    spec: &FeatureSpec,
) -> Result<(FrameBuffer, EarRegion)> {
    let n = spec.frame_size;
    let gray = to_grayscale(&resize(frame, n, n)?.normalized().value);
    let blurred = gaussian_blur(&gray, spec.blur_sigma, spec.blur_radius)?;
    let sx = n as f64 / frame.width as f64;
    let sy = n as f64 / frame.height as f64;
    let mut r = region.transformed([[sx, 0.0], [0.0, sy]], [0.0, 0.0]);
    r.clip_box(n, n);
    Ok((blurred, r))
}

/// [`preprocess_frame`] applied to every frame of every sample.
pub fn prepare_samples(samples: &[Sample], spec: &FeatureSpec) -> Result<Vec<Sample>> {
    par_map(samples, |s| {
        let mut frames = Vec::with_capacity(s.frames.len());
        let mut regions = Vec::with_capacity(s.frames.len());
        for (f, r) in s.frames.iter().zip(&s.regions) {
            let (pf, pr) = preprocess_frame(f, r, spec)?;
            frames.push(pf);
            regions.push(pr);
        }
        Ok(Sample { frames, regions, fake: s.fake })
    })
    .into_iter()
    .collect()
}

fn raw_frame(f: &FrameBuffer, r: &EarRegion, spec: &FeatureSpec, parts: FeatureParts) -> Result<RawFrame> {
    let embedding = if parts.embedding {
        pooled_ear_embedding(&f, &r, spec.grid, parts.activation)?
    } else {
        Vec::new()
    };
    let attributes = if parts.attributes { ear_attributes(&r, spec.curvature_k)? } else { Vec::new() };
    let patch = if parts.appearance { crop_patch(&f, &r, spec.patch_size)? } else { Vec::new() };
    Ok(RawFrame { embedding, attributes, patch })
}

fn raw_sample(s: &Sample, spec: &FeatureSpec, parts: FeatureParts) -> Result<Vec<RawFrame>> {
    s.frames.iter().zip(&s.regions).map(|(f, r)| raw_frame(f, r, spec, parts)).collect()
}

/// Feature pipeline fitted on training samples: appearance PCA and
/// per-column min-max scaling. Later inputs are scaled with the frozen
/// ranges and clamped to [0, 1]. All methods take samples already passed
/// through [`prepare_samples`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureExtractor {
    pub spec: FeatureSpec,
    pub parts: FeatureParts,
    pub pca: Option<PcaModel>,
    pub column_min: Vec<f64>,
    pub column_max: Vec<f64>,
    /// `[D1, D2, D3]` of the unscaled feature vector.
    pub dims: [usize; 3],
    /// PCA returned fewer components than requested.
    pub pca_truncated: bool,
}

impl FeatureExtractor {
    pub fn fit(samples: &[Sample], spec: &FeatureSpec, parts: FeatureParts) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("no samples to fit features on"));
        }
        let raw: Vec<Vec<RawFrame>> = par_map(samples, |s| raw_sample(s, spec, parts))
            .into_iter()
            .collect::<Result<_>>()?;
        let (pca, pca_truncated) = if parts.appearance {
            let patches: Vec<Vec<f64>> = raw.iter().flatten().map(|r| r.patch.clone()).collect();
            let fit = pca_fit(&patches, spec.pca_components)?;
            (Some(fit.value), fit.degenerate)
        } else {
            (None, false)
        };
        let mut me = Self {
            spec: spec.clone(),
            parts,
            pca,
            column_min: Vec::new(),
            column_max: Vec::new(),
            dims: [0; 3],
            pca_truncated,
        };
        let vectors: Vec<FeatureVector> = raw
            .iter()
            .flatten()
            .map(|r| me.assemble(r))
            .collect::<Result<_>>()?;
        me.dims = vectors[0].dims();
        let d = vectors[0].len();
        if vectors.iter().any(|v| v.len() != d) {
            return Err(Error::domain("frames produced feature vectors of different lengths"));
        }
        me.column_min = vec![f64::INFINITY; d];
        me.column_max = vec![f64::NEG_INFINITY; d];
        for v in &vectors {
            for (j, x) in v.concat().into_iter().enumerate() {
                me.column_min[j] = me.column_min[j].min(x);
                me.column_max[j] = me.column_max[j].max(x);
            }
        }
        Ok(me)
    }

    fn assemble(&self, r: &RawFrame) -> Result<FeatureVector> {
        let aam = match &self.pca {
            Some(p) => p.project(&r.patch)?,
            None => Vec::new(),
        };
        build_feature_vector(r.embedding.clone(), r.attributes.clone(), aam)
    }

    pub fn dim(&self) -> usize {
        self.column_min.len()
    }

    fn scale(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.column_min.iter().zip(&self.column_max))
            .map(|(&x, (&lo, &hi))| if hi > lo { ((x - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 })
            .collect()
    }

    /// Scaled feature sequence of one sample.
    pub fn sequence(&self, s: &Sample) -> Result<Vec<Vec<f64>>> {
        raw_sample(s, &self.spec, self.parts)?
            .iter()
            .map(|r| Ok(self.scale(&self.assemble(r)?.concat())))
            .collect()
    }

    /// Unscaled feature vectors of one sample.
    pub fn feature_vectors(&self, s: &Sample) -> Result<Vec<FeatureVector>> {
        raw_sample(s, &self.spec, self.parts)?.iter().map(|r| self.assemble(r)).collect()
    }

    /// Sequences for the Bi-GRU and their frame means for the DBN.
    pub fn labeled_set(&self, samples: &[Sample]) -> Result<LabeledSet> {
        let sequences: Vec<Vec<Vec<f64>>> = par_map(samples, |s| self.sequence(s))
            .into_iter()
            .collect::<Result<_>>()?;
        let summaries = sequences.iter().map(|seq| frame_mean(seq)).collect();
        Ok(LabeledSet { sequences, summaries, labels: samples.iter().map(|s| s.fake).collect() })
    }
}

fn frame_mean(seq: &[Vec<f64>]) -> Vec<f64> {
    let mut m = vec![0.0; seq[0].len()];
    for x in seq {
        for (a, b) in m.iter_mut().zip(x) {
            *a += b;
        }
    }
    m.iter_mut().for_each(|a| *a /= seq.len() as f64);
    m
}
