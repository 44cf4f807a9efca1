use serde::{Deserialize, Serialize};

use super::ear::EarRegion;
use super::frame::{resize, FrameBuffer};
use crate::activation::ActivationKind;
use crate::error::{Error, Result};

/// `[f_ircnn | f_ea | f_aam]`: embedding, ear geometry and appearance parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub f_ircnn: Vec<f64>,
    pub f_ea: Vec<f64>,
    pub f_aam: Vec<f64>,
}

impl FeatureVector {
    pub fn dims(&self) -> [usize; 3] {
        [self.f_ircnn.len(), self.f_ea.len(), self.f_aam.len()]
    }

    pub fn len(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn concat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        v.extend_from_slice(&self.f_ircnn);
        v.extend_from_slice(&self.f_ea);
        v.extend_from_slice(&self.f_aam);
        v
    }

    pub fn split(flat: &[f64], dims: [usize; 3]) -> Result<FeatureVector> {
        if flat.len() != dims.iter().sum::<usize>() {
            return Err(Error::domain(format!(
                "flat length {} does not match dims {dims:?}",
                flat.len()
            )));
        }
        let (a, rest) = flat.split_at(dims[0]);
        let (b, c) = rest.split_at(dims[1]);
        Ok(FeatureVector { f_ircnn: a.to_vec(), f_ea: b.to_vec(), f_aam: c.to_vec() })
    }
}

pub fn build_feature_vector(
    f_ircnn: Vec<f64>,
    f_ea: Vec<f64>,
    f_aam: Vec<f64>,
) -> Result<FeatureVector> {
    for (name, part) in [("f_ircnn", &f_ircnn), ("f_ea", &f_ea), ("f_aam", &f_aam)] {
        if part.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!("{name} contains a non-finite value")));
        }
    }
    Ok(FeatureVector { f_ircnn, f_ea, f_aam })
}

/// Pixel index range `[x0, x1) x [y0, y1)` covered by the region's box.
fn box_pixels(frame: &FrameBuffer, region: &EarRegion) -> Result<(usize, usize, usize, usize)> {
    region.validate(frame.width, frame.height)?;
    let b = &region.bbox;
    let x0 = b.x.floor() as usize;
    let y0 = b.y.floor() as usize;
    let x1 = ((b.x + b.w).ceil() as usize).clamp(x0 + 1, frame.width);
    let y1 = ((b.y + b.h).ceil() as usize).clamp(y0 + 1, frame.height);
    Ok((x0, y0, x1, y1))
}

fn crop(frame: &FrameBuffer, region: &EarRegion) -> Result<FrameBuffer> {
    if frame.channels != 1 {
        return Err(Error::domain("ear features expect a grayscale frame"));
    }
    let (x0, y0, x1, y1) = box_pixels(frame, region)?;
    Ok(FrameBuffer::from_fn(x1 - x0, y1 - y0, |x, y| frame.get(x0 + x, y0 + y, 0)))
}

/// Mean intensity over a `grid x grid` partition of the ear box, passed
/// through `activation` element-wise. Cells are assigned by integer
/// division, so every pixel belongs to exactly one cell.
pub fn pooled_ear_embedding(
    frame: &FrameBuffer,
    region: &EarRegion,
    grid: usize,
    activation: ActivationKind,
) -> Result<Vec<f64>> {
    if grid == 0 {
        return Err(Error::domain("embedding grid must be at least 1"));
    }
    let patch = crop(frame, region)?;
    let (w, h) = (patch.width, patch.height);
    let mut sums = vec![0.0; grid * grid];
    let mut counts = vec![0usize; grid * grid];
    for y in 0..h {
        let gy = y * grid / h;
        for x in 0..w {
            let gx = x * grid / w;
            sums[gy * grid + gx] += patch.get(x, y, 0);
            counts[gy * grid + gx] += 1;
        }
    }
    // boxes narrower than the grid leave cells empty; they read as zero
    Ok(sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| activation.eval(if c > 0 { s / c as f64 } else { 0.0 }))
        .collect())
}

/// The ear box resampled to `size x size`, flattened row-major. Input to
/// the appearance PCA.
pub fn crop_patch(frame: &FrameBuffer, region: &EarRegion, size: usize) -> Result<Vec<f64>> {
    let patch = crop(frame, region)?;
    Ok(resize(&patch, size, size)?.data)
}
