//! Restricted Boltzmann machines stacked into a deep belief network.
//!
//! Energy of a binary RBM state: `E(v, h) = -b·v - c·h - hᵀ W v`, with `W`
//! stored hidden × visible. Layers are pretrained greedily with CD-1; the
//! deterministic forward pass propagates hidden probabilities (mean field)
//! and ends in a logistic head.
//!
//! Flat layout (for the swarm optimiser): per layer `W` (row-major),
//! visible bias, hidden bias; then head weights and head bias.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::activation::logistic;
use crate::error::{Error, Result};
use crate::linalg::{dot, FlatReader, Mat};

/// Largest visible + hidden count accepted by the exact enumerations.
pub const MAX_EXACT_UNITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmLayer {
    pub weights: Mat,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
}

/// CD-1 statistics difference `<v hᵀ>_data - <v hᵀ>_recon` and the bias terms,
/// averaged over the batch.
#[derive(Debug, Clone, PartialEq)]
pub struct RbmGradient {
    pub weights: Mat,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
}

impl RbmLayer {
    pub fn zeros(visible: usize, hidden: usize) -> Self {
        Self {
            weights: Mat::zeros(hidden, visible),
            visible_bias: vec![0.0; visible],
            hidden_bias: vec![0.0; hidden],
        }
    }

    /// Small Gaussian weights (σ = 0.01), zero biases.
    pub fn random<R: Rng + ?Sized>(visible: usize, hidden: usize, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, 0.01).unwrap();
        Self {
            weights: Mat::from_fn(hidden, visible, |_, _| normal.sample(rng)),
            visible_bias: vec![0.0; visible],
            hidden_bias: vec![0.0; hidden],
        }
    }

    pub fn visible(&self) -> usize {
        self.weights.cols
    }

    pub fn hidden(&self) -> usize {
        self.weights.rows
    }

    pub fn param_count(&self) -> usize {
        self.visible() * self.hidden() + self.visible() + self.hidden()
    }

    /// `P(h_j = 1 | v) = σ(W_j · v + c_j)`
    pub fn hidden_probs(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.visible() {
            return Err(Error::domain(format!(
                "RBM expects {} visible units, got {}",
                self.visible(),
                v.len()
            )));
        }
        Ok(self.hidden_probs_unchecked(v))
    }

    fn hidden_probs_unchecked(&self, v: &[f64]) -> Vec<f64> {
        (0..self.hidden())
            .map(|j| logistic(dot(self.weights.row(j), v) + self.hidden_bias[j]))
            .collect()
    }

    /// `P(v_i = 1 | h) = σ(Σ_j W_ji h_j + b_i)`
    pub fn visible_probs(&self, h: &[f64]) -> Result<Vec<f64>> {
        if h.len() != self.hidden() {
            return Err(Error::domain("hidden vector has wrong dimension"));
        }
        let mut act = self.visible_bias.clone();
        self.weights.mul_t_add(h, &mut act);
        Ok(act.into_iter().map(logistic).collect())
    }

    pub fn energy(&self, v: &[f64], h: &[f64]) -> f64 {
        let mut hw = 0.0;
        for (j, &hj) in h.iter().enumerate() {
            hw += hj * dot(self.weights.row(j), v);
        }
        -dot(&self.visible_bias, v) - dot(&self.hidden_bias, h) - hw
    }

    /// Mean squared error between `v` and its one-step mean-field reconstruction.
    pub fn reconstruction_error(&self, v: &[f64]) -> Result<f64> {
        let h = self.hidden_probs(v)?;
        let r = self.visible_probs(&h)?;
        Ok(v.iter().zip(&r).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / v.len() as f64)
    }

    /// CD-1 estimate: positive statistics from the data, one Gibbs step
    /// (sampled hidden, mean-field visible reconstruction), negative
    /// statistics from the reconstruction.
    pub fn cd1_gradient<R: Rng + ?Sized>(&self, batch: &[Vec<f64>], rng: &mut R) -> Result<RbmGradient> {
        if batch.is_empty() {
            return Err(Error::domain("empty batch"));
        }
        let (nv, nh) = (self.visible(), self.hidden());
        let mut gw = Mat::zeros(nh, nv);
        let mut gb = vec![0.0; nv];
        let mut gc = vec![0.0; nh];
        for v0 in batch {
            let h0 = self.hidden_probs(v0)?;
            let h0_sample: Vec<f64> =
                h0.iter().map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 }).collect();
            let v1 = self.visible_probs(&h0_sample)?;
            let h1 = self.hidden_probs_unchecked(&v1);
            for j in 0..nh {
                let row = &mut gw.data[j * nv..(j + 1) * nv];
                for i in 0..nv {
                    row[i] += h0[j] * v0[i] - h1[j] * v1[i];
                }
                gc[j] += h0[j] - h1[j];
            }
            for i in 0..nv {
                gb[i] += v0[i] - v1[i];
            }
        }
        let n = batch.len() as f64;
        gw.data.iter_mut().for_each(|g| *g /= n);
        gb.iter_mut().for_each(|g| *g /= n);
        gc.iter_mut().for_each(|g| *g /= n);
        Ok(RbmGradient { weights: gw, visible_bias: gb, hidden_bias: gc })
    }

    pub fn apply_gradient(&self, g: &RbmGradient, learning_rate: f64) -> Self {
        let mut out = self.clone();
        for (w, d) in out.weights.data.iter_mut().zip(&g.weights.data) {
            *w += learning_rate * d;
        }
        for (b, d) in out.visible_bias.iter_mut().zip(&g.visible_bias) {
            *b += learning_rate * d;
        }
        for (c, d) in out.hidden_bias.iter_mut().zip(&g.hidden_bias) {
            *c += learning_rate * d;
        }
        out
    }

    /// Log partition function by enumerating visible states and summing the
    /// hidden units out analytically.
    pub fn exact_log_partition(&self) -> Result<f64> {
        let (nv, nh) = (self.visible(), self.hidden());
        if nv + nh > MAX_EXACT_UNITS {
            return Err(Error::Refused(format!(
                "exact partition limited to {MAX_EXACT_UNITS} units, got {}",
                nv + nh
            )));
        }
        let terms: Vec<f64> = (0..1u64 << nv)
            .map(|bits| {
                let v = bits_to_vec(bits, nv);
                self.log_unnormalized_marginal(&v)
            })
            .collect();
        Ok(log_sum_exp(&terms))
    }

    /// `log Σ_h exp(-E(v, h)) = b·v + Σ_j softplus(W_j·v + c_j)`
    pub fn log_unnormalized_marginal(&self, v: &[f64]) -> f64 {
        let mut acc = dot(&self.visible_bias, v);
        for j in 0..self.hidden() {
            acc += softplus(dot(self.weights.row(j), v) + self.hidden_bias[j]);
        }
        acc
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Binary vector from the low `n` bits of `bits` (bit `i` → unit `i`).
pub fn bits_to_vec(bits: u64, n: usize) -> Vec<f64> {
    (0..n).map(|i| ((bits >> i) & 1) as f64).collect()
}

pub fn rbm_hidden_probs(layer: &RbmLayer, v: &[f64]) -> Result<Vec<f64>> {
    layer.hidden_probs(v)
}

pub fn rbm_exact_log_partition(layer: &RbmLayer) -> Result<f64> {
    layer.exact_log_partition()
}

/// One CD-1 step on `batch`; returns the updated layer.
pub fn rbm_cd1_update<R: Rng + ?Sized>(
    layer: &RbmLayer,
    batch: &[Vec<f64>],
    learning_rate: f64,
    rng: &mut R,
) -> Result<RbmLayer> {
    if !(learning_rate >= 0.0) {
        return Err(Error::domain("learning rate must be non-negative"));
    }
    let g = layer.cd1_gradient(batch, rng)?;
    Ok(layer.apply_gradient(&g, learning_rate))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PretrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        Self { epochs: 20, learning_rate: 0.1, batch_size: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbnModel {
    pub layers: Vec<RbmLayer>,
    pub head_weights: Vec<f64>,
    pub head_bias: f64,
}

impl DbnModel {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        Ok(Self {
            layers: dims.windows(2).map(|w| RbmLayer::zeros(w[0], w[1])).collect(),
            head_weights: vec![0.0; *dims.last().unwrap()],
            head_bias: 0.0,
        })
    }

    /// Layer sizes, visible first.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.layers[0].visible()];
        d.extend(self.layers.iter().map(|l| l.hidden()));
        d
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].visible()
    }

    /// Top-layer hidden probabilities under the mean-field pass.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut act = x.to_vec();
        for layer in &self.layers {
            act = layer.hidden_probs(&act)?;
        }
        Ok(act)
    }

    /// Deterministic score in (0, 1).
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        let top = self.features(x)?;
        Ok(logistic(dot(&self.head_weights, &top) + self.head_bias))
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(param_count(&self.dims()));
        for l in &self.layers {
            out.extend_from_slice(&l.weights.data);
            out.extend_from_slice(&l.visible_bias);
            out.extend_from_slice(&l.hidden_bias);
        }
        out.extend_from_slice(&self.head_weights);
        out.push(self.head_bias);
        out
    }

    pub fn unflatten(flat: &[f64], dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        let expected = param_count(dims);
        if flat.len() != expected {
            return Err(Error::domain(format!(
                "DBN expects {expected} parameters, got {}",
                flat.len()
            )));
        }
        let mut r = FlatReader::new(flat);
        let layers = dims
            .windows(2)
            .map(|w| RbmLayer {
                weights: r.mat(w[1], w[0]),
                visible_bias: r.take(w[0]),
                hidden_bias: r.take(w[1]),
            })
            .collect();
        let head_weights = r.take(*dims.last().unwrap());
        let head_bias = r.take(1)[0];
        Ok(Self { layers, head_weights, head_bias })
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::domain("DBN needs at least one layer of non-zero sizes"));
    }
    Ok(())
}

/// Flat length for layer sizes `dims` (visible first) plus the head.
pub fn param_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[0] * w[1] + w[0] + w[1]).sum::<usize>() + dims.last().unwrap() + 1
}

pub fn dbn_forward(model: &DbnModel, x: &[f64]) -> Result<f64> {
    model.forward(x)
}

pub fn flatten_w2(model: &DbnModel) -> Vec<f64> {
    model.flatten()
}

pub fn unflatten_w2(flat: &[f64], dims: &[usize]) -> Result<DbnModel> {
    DbnModel::unflatten(flat, dims)
}

pub fn dbn_pretrain<R: Rng + ?Sized>(
    dims: &[usize],
    data: &[Vec<f64>],
    config: &PretrainConfig,
    rng: &mut R,
) -> Result<DbnModel> {
    dbn_pretrain_observed(dims, data, config, rng, |_, _| {})
}

/// Greedy layer-wise pretraining. Each layer is initialised when its phase
/// starts and trained on the mean-field activations of the layers below;
/// `observe(l, layers)` runs after phase `l` with the layers trained so far.
pub fn dbn_pretrain_observed<R: Rng + ?Sized>(
    dims: &[usize],
    data: &[Vec<f64>],
    config: &PretrainConfig,
    rng: &mut R,
    mut observe: impl FnMut(usize, &[RbmLayer]),
) -> Result<DbnModel> {
    check_dims(dims)?;
    if data.is_empty() {
        return Err(Error::domain("no pretraining data"));
    }
    if data.iter().any(|x| x.len() != dims[0]) {
        return Err(Error::domain("pretraining sample has wrong dimension"));
    }
    if data.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::domain("pretraining data must lie in [0, 1]"));
    }
    let batch_size = config.batch_size.max(1);
    let mut layers: Vec<RbmLayer> = Vec::with_capacity(dims.len() - 1);
    let mut input: Vec<Vec<f64>> = data.to_vec();
    for (l, w) in dims.windows(2).enumerate() {
        let mut layer = RbmLayer::random(w[0], w[1], rng);
        for _ in 0..config.epochs {
            for chunk in input.chunks(batch_size) {
                layer = rbm_cd1_update(&layer, chunk, config.learning_rate, rng)?;
            }
        }
        input = input.iter().map(|x| layer.hidden_probs_unchecked(x)).collect();
        layers.push(layer);
        observe(l, &layers);
    }
    Ok(DbnModel { head_weights: vec![0.0; *dims.last().unwrap()], head_bias: 0.0, layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_layer_probs() {
        let l = RbmLayer::zeros(3, 2);
        assert_eq!(l.hidden_probs(&[1.0, 0.0, 1.0]).unwrap(), vec![0.5, 0.5]);
        let mut l = RbmLayer::zeros(2, 1);
        l.hidden_bias[0] = 50.0;
        assert!(l.hidden_probs(&[0.0, 1.0]).unwrap()[0] > 1.0 - 1e-12);
        assert!(l.hidden_probs(&[0.0]).is_err());
    }

    #[test]
    fn log_partition_trivial() {
        assert!((RbmLayer::zeros(2, 2).exact_log_partition().unwrap() - 16f64.ln()).abs() < 1e-14);
        assert!((RbmLayer::zeros(1, 1).exact_log_partition().unwrap() - 4f64.ln()).abs() < 1e-14);
        assert!(RbmLayer::zeros(12, 9).exact_log_partition().is_err());
    }

    #[test]
    fn zero_learning_rate_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = RbmLayer::random(4, 3, &mut rng);
        let batch = vec![vec![1.0, 0.0, 1.0, 0.0]];
        assert_eq!(rbm_cd1_update(&l, &batch, 0.0, &mut rng).unwrap(), l);
        assert!(rbm_cd1_update(&l, &[], 0.1, &mut rng).is_err());
    }

    #[test]
    fn param_counts() {
        assert_eq!(param_count(&[6, 4, 2]), 51);
        let m = DbnModel::zeros(&[6, 4, 2]).unwrap();
        assert_eq!(m.flatten().len(), 51);
        assert_eq!(DbnModel::unflatten(&[0.0; 51], &[6, 4, 2]).unwrap(), m);
        assert!(DbnModel::unflatten(&[0.0; 50], &[6, 4, 2]).is_err());
    }

    #[test]
    fn zero_model_scores_half() {
        let m = DbnModel::zeros(&[3, 2, 2]).unwrap();
        assert_eq!(m.forward(&[0.1, 0.9, 0.3]).unwrap(), 0.5);
        assert!(m.forward(&[0.1]).is_err());
    }

    #[test]
    fn hand_computed_two_two_one() {
        // identity-like first layer, head on the single top unit
        let mut m = DbnModel::zeros(&[2, 2, 1]).unwrap();
        m.layers[0].weights = Mat { rows: 2, cols: 2, data: vec![1.0, 0.0, 0.0, 1.0] };
        m.layers[1].weights = Mat { rows: 1, cols: 2, data: vec![1.0, -1.0] };
        m.head_weights = vec![2.0];
        m.head_bias = -1.0;
        let x = [1.0, 0.0];
        let h1 = [logistic(1.0), logistic(0.0)];
        let h2 = logistic(h1[0] - h1[1]);
        let expected = logistic(2.0 * h2 - 1.0);
        assert!((m.forward(&x).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn pretrain_zero_epochs_keeps_init() {
        let data = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]];
        let cfg = PretrainConfig { epochs: 0, ..Default::default() };
        let m = dbn_pretrain(&[3, 2], &data, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let init = RbmLayer::random(3, 2, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(m.layers[0], init);
        assert_eq!(m.head_weights, vec![0.0; 2]);
        assert!(dbn_pretrain(&[3, 2], &[], &cfg, &mut ChaCha8Rng::seed_from_u64(3)).is_err());
        assert!(dbn_pretrain(&[3, 2], &[vec![2.0, 0.0, 0.0]], &cfg, &mut ChaCha8Rng::seed_from_u64(3)).is_err());
    }

    #[test]
    fn single_layer_is_plain_rbm_training() {
        let data = vec![vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]];
        let cfg = PretrainConfig { epochs: 5, learning_rate: 0.2, batch_size: 2 };
        let m = dbn_pretrain(&[4, 3], &data, &cfg, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut layer = RbmLayer::random(4, 3, &mut rng);
        for _ in 0..5 {
            layer = rbm_cd1_update(&layer, &data, 0.2, &mut rng).unwrap();
        }
        assert_eq!(m.layers[0], layer);
    }
}
