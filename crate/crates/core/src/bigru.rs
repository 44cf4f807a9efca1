//! GRU cell and bidirectional sequence scorer.
//!
//! Parameters are exposed as one flat vector so the swarm optimiser can
//! search them directly. Flat layout, per direction (forward then
//! backward): `W_r, W_z, W_h` (hidden × input, row-major), `V_r, V_z, V_h`
//! (hidden × hidden), `g_r, g_z, g_h` (hidden); then the readout weights
//! (2 × hidden) and the readout bias.

use serde::{Deserialize, Serialize};

use crate::activation::logistic;
use crate::error::{Error, Result};
use crate::linalg::{dot, FlatReader, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GruDims {
    pub input: usize,
    pub hidden: usize,
}

impl GruDims {
    pub fn cell_params(&self) -> usize {
        3 * (self.hidden * self.input + self.hidden * self.hidden + self.hidden)
    }

    /// Flat length of a full bidirectional model with readout.
    pub fn param_count(&self) -> usize {
        2 * self.cell_params() + 2 * self.hidden + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GruWeights {
    pub w_r: Mat,
    pub w_z: Mat,
    pub w_h: Mat,
    pub v_r: Mat,
    pub v_z: Mat,
    pub v_h: Mat,
    pub g_r: Vec<f64>,
    pub g_z: Vec<f64>,
    pub g_h: Vec<f64>,
}

impl GruWeights {
    pub fn zeros(dims: GruDims) -> Self {
        let (i, h) = (dims.input, dims.hidden);
        Self {
            w_r: Mat::zeros(h, i),
            w_z: Mat::zeros(h, i),
            w_h: Mat::zeros(h, i),
            v_r: Mat::zeros(h, h),
            v_z: Mat::zeros(h, h),
            v_h: Mat::zeros(h, h),
            g_r: vec![0.0; h],
            g_z: vec![0.0; h],
            g_h: vec![0.0; h],
        }
    }

    pub fn dims(&self) -> GruDims {
        GruDims { input: self.w_r.cols, hidden: self.w_r.rows }
    }

    fn push_flat(&self, out: &mut Vec<f64>) {
        for m in [&self.w_r, &self.w_z, &self.w_h, &self.v_r, &self.v_z, &self.v_h] {
            out.extend_from_slice(&m.data);
        }
        for g in [&self.g_r, &self.g_z, &self.g_h] {
            out.extend_from_slice(g);
        }
    }

    fn read_flat(r: &mut FlatReader<'_>, dims: GruDims) -> Self {
        let (i, h) = (dims.input, dims.hidden);
        Self {
            w_r: r.mat(h, i),
            w_z: r.mat(h, i),
            w_h: r.mat(h, i),
            v_r: r.mat(h, h),
            v_z: r.mat(h, h),
            v_h: r.mat(h, h),
            g_r: r.take(h),
            g_z: r.take(h),
            g_h: r.take(h),
        }
    }

    /// One recurrence step:
    ///
    /// ```text
    /// r  = σ(W_r x + V_r h + g_r)
    /// z  = σ(W_z x + V_z h + g_z)
    /// h' = tanh(W_h x + V_h (r ⊙ h) + g_h)
    /// h_t = (1 - z) ⊙ h + z ⊙ h'
    /// ```
    pub fn step(&self, x: &[f64], h_prev: &[f64]) -> Result<Vec<f64>> {
        let d = self.dims();
        if x.len() != d.input || h_prev.len() != d.hidden {
            return Err(Error::domain(format!(
                "gru step expects input {} / hidden {}, got {} / {}",
                d.input,
                d.hidden,
                x.len(),
                h_prev.len()
            )));
        }
        let mut out = vec![0.0; d.hidden];
        self.step_into(x, h_prev, &mut out);
        Ok(out)
    }

    fn step_into(&self, x: &[f64], h_prev: &[f64], out: &mut [f64]) {
        let h = self.dims().hidden;
        let mut reset_h = vec![0.0; h];
        let mut z = vec![0.0; h];
        for k in 0..h {
            let r = logistic(dot(self.w_r.row(k), x) + dot(self.v_r.row(k), h_prev) + self.g_r[k]);
            reset_h[k] = r * h_prev[k];
            z[k] = logistic(dot(self.w_z.row(k), x) + dot(self.v_z.row(k), h_prev) + self.g_z[k]);
        }
        for k in 0..h {
            let cand = (dot(self.w_h.row(k), x) + dot(self.v_h.row(k), &reset_h) + self.g_h[k]).tanh();
            out[k] = (1.0 - z[k]) * h_prev[k] + z[k] * cand;
        }
    }

    /// Scan `seq` in the given order from a zero state, returning every state.
    fn scan<'a>(&self, seq: impl Iterator<Item = &'a Vec<f64>>) -> Vec<Vec<f64>> {
        let h = self.dims().hidden;
        let mut state = vec![0.0; h];
        let mut states = Vec::new();
        for x in seq {
            let mut next = vec![0.0; h];
            self.step_into(x, &state, &mut next);
            state = next;
            states.push(state.clone());
        }
        states
    }
}

/// Convenience wrapper for a single step.
pub fn gru_step(w: &GruWeights, x: &[f64], h_prev: &[f64]) -> Result<Vec<f64>> {
    w.step(x, h_prev)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiGruModel {
    pub forward: GruWeights,
    pub backward: GruWeights,
    pub readout: Vec<f64>,
    pub bias: f64,
}

impl BiGruModel {
    pub fn zeros(dims: GruDims) -> Self {
        Self {
            forward: GruWeights::zeros(dims),
            backward: GruWeights::zeros(dims),
            readout: vec![0.0; 2 * dims.hidden],
            bias: 0.0,
        }
    }

    pub fn dims(&self) -> GruDims {
        self.forward.dims()
    }

    fn check_sequence(&self, seq: &[Vec<f64>]) -> Result<()> {
        if seq.is_empty() {
            return Err(Error::domain("empty sequence"));
        }
        let input = self.dims().input;
        if let Some(bad) = seq.iter().find(|x| x.len() != input) {
            return Err(Error::domain(format!(
                "sequence element has dimension {}, model expects {input}",
                bad.len()
            )));
        }
        Ok(())
    }

    /// Per-timestep concatenation of forward and backward states.
    /// Entry `t` joins the forward state after `x_1..x_t` with the backward
    /// state after `x_T..x_t`.
    pub fn states(&self, seq: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.check_sequence(seq)?;
        let fwd = self.forward.scan(seq.iter());
        let mut bwd = self.backward.scan(seq.iter().rev());
        bwd.reverse();
        Ok(fwd
            .into_iter()
            .zip(bwd)
            .map(|(mut f, b)| {
                f.extend_from_slice(&b);
                f
            })
            .collect())
    }

    /// Forward state after the whole sequence joined with the backward
    /// state after the whole reversed sequence.
    pub fn forward_pass(&self, seq: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.check_sequence(seq)?;
        let mut out = self.forward.scan(seq.iter()).pop().unwrap();
        out.extend(self.backward.scan(seq.iter().rev()).pop().unwrap());
        Ok(out)
    }

    /// Logistic readout of [`BiGruModel::forward_pass`]; in (0, 1).
    pub fn score(&self, seq: &[Vec<f64>]) -> Result<f64> {
        let state = self.forward_pass(seq)?;
        Ok(logistic(dot(&self.readout, &state) + self.bias))
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dims().param_count());
        self.forward.push_flat(&mut out);
        self.backward.push_flat(&mut out);
        out.extend_from_slice(&self.readout);
        out.push(self.bias);
        out
    }

    pub fn unflatten(flat: &[f64], dims: GruDims) -> Result<Self> {
        if flat.len() != dims.param_count() {
            return Err(Error::domain(format!(
                "Bi-GRU expects {} parameters, got {}",
                dims.param_count(),
                flat.len()
            )));
        }
        let mut r = FlatReader::new(flat);
        let forward = GruWeights::read_flat(&mut r, dims);
        let backward = GruWeights::read_flat(&mut r, dims);
        let readout = r.take(2 * dims.hidden);
        let bias = r.take(1)[0];
        Ok(Self { forward, backward, readout, bias })
    }
}

pub fn bigru_forward(model: &BiGruModel, seq: &[Vec<f64>]) -> Result<Vec<f64>> {
    model.forward_pass(seq)
}

pub fn bigru_score(model: &BiGruModel, seq: &[Vec<f64>]) -> Result<f64> {
    model.score(seq)
}

pub fn flatten_w1(model: &BiGruModel) -> Vec<f64> {
    model.flatten()
}

pub fn unflatten_w1(flat: &[f64], dims: GruDims) -> Result<BiGruModel> {
    BiGruModel::unflatten(flat, dims)
}
