//! Oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use jellyfuse::activation::logistic;
use jellyfuse::dbn::{bits_to_vec, RbmGradient, RbmLayer};
use jellyfuse::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_rbm(rng: &mut ChaCha8Rng, nv: usize, nh: usize) -> RbmLayer {
    RbmLayer {
        weights: Mat::from_fn(nh, nv, |_, _| rng.random_range(-2.0..2.0)),
        visible_bias: (0..nv).map(|_| rng.random_range(-1.0..1.0)).collect(),
        hidden_bias: (0..nh).map(|_| rng.random_range(-1.0..1.0)).collect(),
    }
}

/// `P(h_j = 1 | v)` by summing `exp(-E)` over every hidden configuration.
pub fn enumerated_hidden(rbm: &RbmLayer, v: &[f64]) -> Vec<f64> {
    let nh = rbm.hidden();
    let mut num = vec![0.0; nh];
    let mut z = 0.0;
    for bits in 0..1u64 << nh {
        let h = bits_to_vec(bits, nh);
        let p = (-rbm.energy(v, &h)).exp();
        z += p;
        for j in 0..nh {
            num[j] += h[j] * p;
        }
    }
    num.iter().map(|n| n / z).collect()
}

pub fn enumerated_visible(rbm: &RbmLayer, h: &[f64]) -> Vec<f64> {
    let nv = rbm.visible();
    let mut num = vec![0.0; nv];
    let mut z = 0.0;
    for bits in 0..1u64 << nv {
        let v = bits_to_vec(bits, nv);
        let p = (-rbm.energy(&v, h)).exp();
        z += p;
        for i in 0..nv {
            num[i] += v[i] * p;
        }
    }
    num.iter().map(|n| n / z).collect()
}

/// Flattened `[W (row-major), b, c]` of the expected CD-1 update when `v0`
/// is drawn from `p_data`, computed by enumerating `v0` and the sampled `h0`.
pub fn exact_cd1_expectation(rbm: &RbmLayer, p_data: &[f64]) -> Vec<f64> {
    let (nv, nh) = (rbm.visible(), rbm.hidden());
    let mut g = vec![0.0; nv * nh + nv + nh];
    for (vb, &pv) in p_data.iter().enumerate() {
        let v0 = bits_to_vec(vb as u64, nv);
        let ph0 = rbm.hidden_probs(&v0).unwrap();
        for hb in 0..1u64 << nh {
            let h0 = bits_to_vec(hb, nh);
            let p_h: f64 = (0..nh).map(|j| if h0[j] == 1.0 { ph0[j] } else { 1.0 - ph0[j] }).product();
            let v1 = rbm.visible_probs(&h0).unwrap();
            let h1: Vec<f64> = (0..nh)
                .map(|j| logistic(rbm.weights.row(j).iter().zip(&v1).map(|(w, v)| w * v).sum::<f64>() + rbm.hidden_bias[j]))
                .collect();
            let w = pv * p_h;
            for j in 0..nh {
                for i in 0..nv {
                    g[j * nv + i] += w * (ph0[j] * v0[i] - h1[j] * v1[i]);
                }
                g[nv * nh + nv + j] += w * (ph0[j] - h1[j]);
            }
            for i in 0..nv {
                g[nv * nh + i] += w * (v0[i] - v1[i]);
            }
        }
    }
    g
}

pub fn flatten(g: &RbmGradient) -> Vec<f64> {
    g.weights.data.iter().chain(&g.visible_bias).chain(&g.hidden_bias).copied().collect()
}

pub fn sample_index(p: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// Mean and standard error of 10,000 single-sample CD-1 estimates.
pub fn monte_carlo(rbm: &RbmLayer, p_data: &[f64], seed: u64) -> (Vec<f64>, Vec<f64>) {
    let n = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rbm.param_count();
    let (mut sum, mut sq) = (vec![0.0; dim], vec![0.0; dim]);
    for _ in 0..n {
        let v0 = bits_to_vec(sample_index(p_data, &mut rng) as u64, rbm.visible());
        let g = flatten(&rbm.cd1_gradient(&[v0], &mut rng).unwrap());
        for k in 0..dim {
            sum[k] += g[k];
            sq[k] += g[k] * g[k];
        }
    }
    let nf = n as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / nf).collect();
    let se = (0..dim).map(|k| ((sq[k] / nf - mean[k] * mean[k]) * nf / (nf - 1.0)).sqrt() / nf.sqrt()).collect();
    (mean, se)
}

pub fn pair_count_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

