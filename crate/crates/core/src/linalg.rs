//! Minimal row-major dense matrix for the small recurrent and belief models.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `out[r] += (self * x)[r]`
    #[inline]
    pub fn mul_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate().take(self.rows) {
            *o += dot(self.row(r), x);
        }
    }

    /// `out[c] += (selfᵀ * x)[c]`
    #[inline]
    pub fn mul_t_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        for (r, &xr) in x.iter().enumerate() {
            for (o, w) in out.iter_mut().zip(self.row(r)) {
                *o += w * xr;
            }
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reads consecutive slices out of a flat parameter vector.
pub(crate) struct FlatReader<'a> {
    flat: &'a [f64],
    pos: usize,
}

impl<'a> FlatReader<'a> {
    pub(crate) fn new(flat: &'a [f64]) -> Self {
        Self { flat, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Vec<f64> {
        let out = self.flat[self.pos..self.pos + n].to_vec();
        self.pos += n;
        out
    }

    pub(crate) fn mat(&mut self, rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: self.take(rows * cols) }
    }
}
