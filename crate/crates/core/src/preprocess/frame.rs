use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagged::Flagged;

pub const TARGET_SIZE: usize = 224;
pub const DEFAULT_BLUR_SIGMA: f64 = 1.0;
pub const DEFAULT_BLUR_RADIUS: usize = 2;

/// Row-major pixel grid with 1 (gray) or 3 (RGB, interleaved) channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBuffer {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl FrameBuffer {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::domain(format!("unsupported channel count {channels}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::domain(format!(
                "frame data length {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Self { width, height, channels, data })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Self {
        Self { width, height, channels, data: vec![value; width * height * channels] }
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, channels: 1, data }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        let idx = (y * self.width + x) * self.channels + c;
        self.data[idx] = v;
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Min-max normalise all intensities to [0, 1].
    pub fn normalized(&self) -> Flagged<FrameBuffer> {
        let n = min_max_normalize_raw(&self.data);
        Flagged::new(FrameBuffer { data: n.value, ..*self }, n.degenerate)
    }
}

fn min_max_normalize_raw(values: &[f64]) -> Flagged<Vec<f64>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return Flagged::new(vec![0.0; values.len()], true);
    }
    let range = hi - lo;
    Flagged::clean(values.iter().map(|v| (v - lo) / range).collect())
}

/// `(v - min) / (max - min)`. A constant input maps to zeros with the flag set.
pub fn min_max_normalize(values: &[f64]) -> Result<Flagged<Vec<f64>>> {
    if values.is_empty() {
        return Err(Error::domain("cannot normalise an empty vector"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("values must be finite"));
    }
    Ok(min_max_normalize_raw(values))
}

/// Bilinear resize with pixel-centre alignment; source coordinates are
/// clamped at the border so corner pixels map onto corner pixels.
pub fn resize(frame: &FrameBuffer, width: usize, height: usize) -> Result<FrameBuffer> {
    if frame.is_empty() || width == 0 || height == 0 {
        return Err(Error::domain("cannot resize an empty frame"));
    }
    if frame.width == width && frame.height == height {
        return Ok(frame.clone());
    }
    let sx = frame.width as f64 / width as f64;
    let sy = frame.height as f64 / height as f64;
    let ch = frame.channels;
    let mut out = FrameBuffer::filled(width, height, ch, 0.0);
    let src_coord = |d: usize, scale: f64, n: usize| -> (usize, usize, f64) {
        let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (n - 1) as f64);
        let i0 = s.floor() as usize;
        let i1 = (i0 + 1).min(n - 1);
        (i0, i1, s - i0 as f64)
    };
    for y in 0..height {
        let (y0, y1, fy) = src_coord(y, sy, frame.height);
        for x in 0..width {
            let (x0, x1, fx) = src_coord(x, sx, frame.width);
            for c in 0..ch {
                let top = frame.get(x0, y0, c) * (1.0 - fx) + frame.get(x1, y0, c) * fx;
                let bot = frame.get(x0, y1, c) * (1.0 - fx) + frame.get(x1, y1, c) * fx;
                out.set(x, y, c, top * (1.0 - fy) + bot * fy);
            }
        }
    }
    Ok(out)
}

/// Luma `0.299 R + 0.587 G + 0.114 B`; single-channel frames pass through.
pub fn to_grayscale(frame: &FrameBuffer) -> FrameBuffer {
    if frame.channels == 1 {
        return frame.clone();
    }
    let data = frame
        .data
        .chunks_exact(3)
        .map(|p| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2])
        .collect();
    FrameBuffer { width: frame.width, height: frame.height, channels: 1, data }
}

/// Normalised Gaussian taps `-radius..=radius`.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Result<Vec<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain("blur sigma must be positive"));
    }
    if radius == 0 {
        return Err(Error::domain("blur radius must be at least 1"));
    }
    let r = radius as i64;
    let mut k: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    Ok(k)
}

/// Half-sample symmetric reflection (`b a | a b c`), repeated for long reaches.
#[inline]
fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Separable Gaussian blur with symmetric reflection at the borders.
/// With a symmetric unit-sum kernel this border rule preserves the total
/// intensity exactly.
pub fn gaussian_blur(frame: &FrameBuffer, sigma: f64, radius: usize) -> Result<FrameBuffer> {
    let k = gaussian_kernel(sigma, radius)?;
    let r = radius as i64;
    let (w, h, ch) = (frame.width, frame.height, frame.channels);
    let mut tmp = FrameBuffer::filled(w, h, ch, 0.0);
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut acc = 0.0;
                for (t, kv) in k.iter().enumerate() {
                    let sx = reflect(x as i64 + t as i64 - r, w);
                    acc += kv * frame.get(sx, y, c);
                }
                tmp.set(x, y, c, acc);
            }
        }
    }
    let mut out = FrameBuffer::filled(w, h, ch, 0.0);
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut acc = 0.0;
                for (t, kv) in k.iter().enumerate() {
                    let sy = reflect(y as i64 + t as i64 - r, h);
                    acc += kv * tmp.get(x, sy, c);
                }
                out.set(x, y, c, acc);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_cases() {
        assert_eq!(min_max_normalize(&[2.0, 4.0, 6.0]).unwrap().value, vec![0.0, 0.5, 1.0]);
        let d = min_max_normalize(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(d.value, vec![0.0; 3]);
        assert!(d.degenerate);
        assert!(min_max_normalize(&[]).is_err());
        assert!(min_max_normalize(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn resize_cases() {
        let f = FrameBuffer::from_fn(224, 224, |x, y| (x * 3 + y) as f64);
        assert_eq!(resize(&f, 224, 224).unwrap(), f);
        let c = FrameBuffer::filled(448, 448, 3, 17.0);
        let r = resize(&c, 224, 224).unwrap();
        assert_eq!((r.width, r.height, r.channels), (224, 224, 3));
        assert!(r.data.iter().all(|&v| (v - 17.0).abs() < 1e-12));
        // 2x2 checkerboard to 4x4: corners keep the source corners, and the
        // inner pixels follow the hand-evaluated bilinear weights 0.75/0.25
        let cb = FrameBuffer::new(2, 2, 1, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let up = resize(&cb, 4, 4).unwrap();
        assert_eq!(up.get(0, 0, 0), 0.0);
        assert_eq!(up.get(3, 0, 0), 1.0);
        assert_eq!(up.get(0, 3, 0), 1.0);
        assert_eq!(up.get(3, 3, 0), 0.0);
        // (1,1) samples source (0.25, 0.25): 0.75*0.25 + 0.25*0.75 = 0.375
        assert!((up.get(1, 1, 0) - 0.375).abs() < 1e-15);
        assert!(resize(&FrameBuffer::filled(0, 3, 1, 0.0), 4, 4).is_err());
    }

    #[test]
    fn grayscale_cases() {
        let white = FrameBuffer::new(1, 1, 3, vec![255.0; 3]).unwrap();
        assert!((to_grayscale(&white).data[0] - 255.0).abs() < 1e-12);
        let red = FrameBuffer::new(1, 1, 3, vec![255.0, 0.0, 0.0]).unwrap();
        assert!((to_grayscale(&red).data[0] - 76.245).abs() < 1e-12);
        let gray = FrameBuffer::new(1, 1, 3, vec![42.0; 3]).unwrap();
        assert!((to_grayscale(&gray).data[0] - 42.0).abs() < 1e-12);
        let one = FrameBuffer::filled(2, 2, 1, 3.0);
        assert_eq!(to_grayscale(&one), one);
    }

    #[test]
    fn kernel_sums_to_one() {
        for (s, r) in [(0.5, 1), (1.0, 2), (2.5, 7)] {
            let k = gaussian_kernel(s, r).unwrap();
            assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(k.len(), 2 * r + 1);
        }
        assert!(gaussian_kernel(0.0, 2).is_err());
        assert!(gaussian_kernel(1.0, 0).is_err());
    }

    #[test]
    fn blur_constant_and_impulse() {
        let c = FrameBuffer::filled(9, 7, 1, 0.4);
        let b = gaussian_blur(&c, 1.0, 2).unwrap();
        assert!(b.data.iter().all(|&v| (v - 0.4).abs() < 1e-12));
        let mut imp = FrameBuffer::filled(9, 9, 1, 0.0);
        imp.set(4, 4, 0, 1.0);
        let b = gaussian_blur(&imp, 1.0, 2).unwrap();
        let centre = b.get(4, 4, 0);
        assert!(b.data.iter().all(|&v| v <= centre));
        for d in 1..=2 {
            assert!((b.get(4 - d, 4, 0) - b.get(4 + d, 4, 0)).abs() < 1e-15);
            assert!((b.get(4, 4 - d, 0) - b.get(4, 4 + d, 0)).abs() < 1e-15);
        }
    }

    #[test]
    fn reflect_indexing() {
        assert_eq!(reflect(-1, 5), 0);
        assert_eq!(reflect(-2, 5), 1);
        assert_eq!(reflect(5, 5), 4);
        assert_eq!(reflect(6, 5), 3);
        assert_eq!(reflect(-7, 3), 0);
    }
}
