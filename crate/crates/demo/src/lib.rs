//! WebAssembly bindings for the browser demo in `www/`.

pub mod ops;

use wasm_bindgen::prelude::*;

fn js(e: jellyfuse::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn activation_names() -> Vec<String> {
    jellyfuse::activation::ActivationKind::ALL.iter().map(|k| k.name().to_string()).collect()
}

#[wasm_bindgen]
pub fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    ops::grid(lo, hi, n).map_err(js)
}

/// Activation (or its derivative) at each of `xs`.
#[wasm_bindgen]
pub fn activation(kind: &str, xs: &[f64], derivative: bool) -> Result<Vec<f64>, JsError> {
    let k = ops::parse_activation(kind).map_err(js)?;
    Ok(ops::activation_values(k, xs, derivative))
}

/// SU-JFO trace followed by the baseline trace, each `iterations + 1` long.
#[wasm_bindgen]
pub fn convergence(
    benchmark: &str,
    dimension: usize,
    population: usize,
    iterations: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    let b = ops::parse_benchmark(benchmark).map_err(js)?;
    let (mut su, base) = ops::convergence_pair(b, dimension, population, iterations, u64::from(seed)).map_err(js)?;
    su.extend(base);
    Ok(su)
}

#[wasm_bindgen]
pub struct FusionView {
    sc_bigru: Vec<f64>,
    sc_dbn: Vec<f64>,
    fused: Vec<f64>,
    decisions: Vec<u8>,
    cv: f64,
    accuracy: f64,
}

#[wasm_bindgen]
impl FusionView {
    /// `labels` holds 1 for fake and 0 for real.
    #[wasm_bindgen(constructor)]
    pub fn new(bigru: &[f64], dbn: &[f64], labels: &[u8], threshold: f64, literal: bool) -> Result<FusionView, JsError> {
        let labels: Vec<bool> = labels.iter().map(|&l| l != 0).collect();
        let r = ops::fuse_batch(bigru, dbn, &labels, threshold, literal).map_err(js)?;
        let correct = r.decisions.iter().zip(&labels).filter(|(d, l)| d == l).count();
        Ok(FusionView {
            accuracy: correct as f64 / labels.len() as f64,
            decisions: r.decisions.iter().map(|&d| u8::from(d)).collect(),
            sc_bigru: r.sc_bigru,
            sc_dbn: r.sc_dbn,
            fused: r.fused,
            cv: r.cv,
        })
    }

    #[wasm_bindgen(getter)]
    pub fn sc_bigru(&self) -> Vec<f64> {
        self.sc_bigru.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn sc_dbn(&self) -> Vec<f64> {
        self.sc_dbn.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn fused(&self) -> Vec<f64> {
        self.fused.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn decisions(&self) -> Vec<u8> {
        self.decisions.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn cv(&self) -> f64 {
        self.cv
    }

    #[wasm_bindgen(getter)]
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }
}
