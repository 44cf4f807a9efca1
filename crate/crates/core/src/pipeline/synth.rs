use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::DatasetSpec;
use crate::error::{Error, Result};
use crate::preprocess::{BoundingBox, EarRegion, FrameBuffer, Landmark};

/// One labelled video: frames with one ear annotation each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub frames: Vec<FrameBuffer>,
    pub regions: Vec<EarRegion>,
    pub fake: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SyntheticDataset {
    pub samples: Vec<Sample>,
}

impl SyntheticDataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.samples.iter().map(|s| s.fake).collect()
    }

    /// `(real, fake)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let fake = self.samples.iter().filter(|s| s.fake).count();
        (self.samples.len() - fake, fake)
    }

    pub fn validate(&self) -> Result<()> {
        let (real, fake) = self.class_counts();
        if real == 0 || fake == 0 {
            return Err(Error::domain("dataset needs both classes"));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if s.frames.is_empty() || s.frames.len() != s.regions.len() {
                return Err(Error::domain(format!("sample {i} needs one annotation per frame")));
            }
            for (f, r) in s.frames.iter().zip(&s.regions) {
                r.validate(f.width, f.height)?;
            }
        }
        Ok(())
    }

    pub fn subset(&self, indices: &[usize]) -> SyntheticDataset {
        SyntheticDataset { samples: indices.iter().map(|&i| self.samples[i].clone()).collect() }
    }
}

/// Per-video ear shape; frames jitter around it.
#[derive(Debug, Clone, Copy)]
struct EarShape {
    center: [f64; 2],
    /// Vertical semi-axis.
    a: f64,
    /// Horizontal semi-axis.
    b: f64,
    theta: f64,
    wobble: f64,
    phase: f64,
    shading: f64,
}

const WOBBLE_HARMONIC: f64 = 4.0;
const SKIN: [f64; 3] = [190.0, 150.0, 130.0];
const EAR: [f64; 3] = [165.0, 120.0, 105.0];
const RIM: [f64; 3] = [205.0, 165.0, 145.0];
const CONCHA: [f64; 3] = [110.0, 75.0, 65.0];
const HAIR: [f64; 3] = [12.0, 8.0, 6.0];
const GLINT: [f64; 3] = [250.0, 250.0, 250.0];

impl EarShape {
    fn radius(&self, u: f64) -> f64 {
        1.0 + self.wobble * (WOBBLE_HARMONIC * u + self.phase).sin()
    }

    fn to_frame(&self, x: f64, y: f64) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [self.center[0] + x * c - y * s, self.center[1] + x * s + y * c]
    }

    fn contour(&self, n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .map(|i| {
                let u = 2.0 * PI * i as f64 / n as f64;
                let r = self.radius(u);
                self.to_frame(self.b * r * u.cos(), self.a * r * u.sin())
            })
            .collect()
    }

    /// RGB at pixel centre `(px, py)` over a background colour.
    fn shade(&self, px: f64, py: f64, background: [f64; 3]) -> [f64; 3] {
        let (s, c) = self.theta.sin_cos();
        let (dx, dy) = (px - self.center[0], py - self.center[1]);
        let (qx, qy) = (dx * c + dy * s, -dx * s + dy * c);
        let (nx, ny) = (qx / self.b, qy / self.a);
        let rho = nx.hypot(ny);
        let edge = self.radius(ny.atan2(nx));
        // one-pixel soft edge keeps the content band-limited
        let inside = ((edge - rho) * self.b + 0.5).clamp(0.0, 1.0);
        if inside == 0.0 {
            return background;
        }
        let rim = ((rho / edge - 0.8) * 10.0).clamp(0.0, 1.0);
        let (cx, cy) = ((qx + 0.12 * self.b) / (0.45 * self.b), (qy - 0.05 * self.a) / (0.5 * self.a));
        let concha = ((1.0 - cx.hypot(cy)) * 4.0).clamp(0.0, 1.0);
        let mut out = [0.0; 3];
        for k in 0..3 {
            let mut v = EAR[k] * (1.0 - rim) + RIM[k] * rim;
            v = v * (1.0 - concha) + (CONCHA[k] + self.shading) * concha;
            out[k] = background[k] * (1.0 - inside) + v * inside;
        }
        out
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn render(shape: &EarShape, spec: &DatasetSpec, rng: &mut ChaCha8Rng) -> (FrameBuffer, EarRegion) {
    let (w, h) = (spec.width, spec.height);
    let noise = Normal::new(0.0, spec.pixel_noise.max(0.0)).expect("finite noise level");
    let tilt = rng.random_range(-0.15..0.15);
    // hair along the top edge and a specular highlight: like real footage,
    // the frame spans nearly the full intensity range
    let hair_line = h as f64 * rng.random_range(0.06..0.12);
    let glint = [rng.random_range(0.1..0.25) * w as f64, rng.random_range(0.75..0.9) * h as f64];
    let mut data = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let grad = 1.0 + tilt * (x as f64 / w as f64 - 0.5);
            let (fx, fy) = (x as f64 + 0.5, y as f64 + 0.5);
            let bg = if fy < hair_line {
                HAIR
            } else if (fx - glint[0]).hypot(fy - glint[1]) < 2.5 {
                GLINT
            } else {
                SKIN.map(|v| v * grad)
            };
            let rgb = shape.shade(fx, fy, bg);
            for v in rgb {
                data.push((v + noise.sample(rng)).round().clamp(0.0, 255.0));
            }
        }
    }
    let contour = shape.contour(spec.contour_points);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &contour {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    let mut region = EarRegion {
        bbox: BoundingBox { x: (x0 - 2.0).floor(), y: (y0 - 2.0).floor(), w: 0.0, h: 0.0 },
        contour,
        landmarks: vec![
            Landmark { name: "helix_top".into(), point: shape.to_frame(0.0, -shape.a * shape.radius(-PI / 2.0)) },
            Landmark { name: "lobule".into(), point: shape.to_frame(0.0, shape.a * shape.radius(PI / 2.0)) },
            Landmark { name: "tragus".into(), point: shape.to_frame(-0.6 * shape.b, 0.05 * shape.a) },
        ],
    };
    region.bbox.w = (x1 + 2.0).ceil() - region.bbox.x;
    region.bbox.h = (y1 + 2.0).ceil() - region.bbox.y;
    region.clip_box(w, h);
    let frame = FrameBuffer { width: w, height: h, channels: 3, data };
    (frame, region)
}

fn generate_sample(spec: &DatasetSpec, fake: bool, rng: &mut ChaCha8Rng) -> Sample {
    let a = (spec.ear_size + spec.ear_size_sd * normal(rng)).max(4.0);
    let aspect_mean = spec.aspect + if fake { spec.fake_aspect_offset } else { 0.0 };
    let aspect = (aspect_mean + spec.aspect_sd * normal(rng)).max(0.5);
    let margin = 3.0;
    let base = EarShape {
        center: [
            spec.width as f64 / 2.0 + rng.random_range(-margin..margin),
            spec.height as f64 / 2.0 + rng.random_range(-margin..margin),
        ],
        a,
        b: a / aspect,
        theta: spec.tilt_sd * normal(rng),
        wobble: if fake { spec.fake_wobble } else { spec.wobble },
        phase: rng.random_range(0.0..2.0 * PI),
        shading: if fake { spec.fake_shading_offset } else { 0.0 },
    };
    let jitter = if fake { spec.fake_jitter } else { spec.jitter };
    let mut frames = Vec::with_capacity(spec.sequence_length);
    let mut regions = Vec::with_capacity(spec.sequence_length);
    for _ in 0..spec.sequence_length {
        let shape = EarShape {
            center: [
                base.center[0] + jitter * base.a * normal(rng),
                base.center[1] + jitter * base.a * normal(rng),
            ],
            a: base.a * (1.0 + jitter * normal(rng)),
            b: base.b * (1.0 + jitter * normal(rng)),
            theta: base.theta + jitter * normal(rng),
            phase: base.phase + 4.0 * jitter * normal(rng),
            ..base
        };
        let (f, r) = render(&shape, spec, rng);
        frames.push(f);
        regions.push(r);
    }
    Sample { frames, regions, fake }
}

/// Real samples first, then fake ones; each sample draws from its own
/// stream so a sample does not depend on the class counts.
pub fn generate_synthetic(spec: &DatasetSpec, seed: u64) -> Result<SyntheticDataset> {
    if spec.real_count == 0 || spec.fake_count == 0 {
        return Err(Error::domain("both class counts must be positive"));
    }
    if spec.sequence_length == 0 {
        return Err(Error::domain("sequence length must be positive"));
    }
    if spec.width < 16 || spec.height < 16 {
        return Err(Error::domain("frames must be at least 16x16"));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let real_seed = master.next_u64();
    let fake_seed = master.next_u64();
    let mut samples = Vec::with_capacity(spec.real_count + spec.fake_count);
    for (count, fake, class_seed) in [(spec.real_count, false, real_seed), (spec.fake_count, true, fake_seed)] {
        let mut class_rng = ChaCha8Rng::seed_from_u64(class_seed);
        for _ in 0..count {
            let mut rng = ChaCha8Rng::seed_from_u64(class_rng.next_u64());
            samples.push(generate_sample(spec, fake, &mut rng));
        }
    }
    let ds = SyntheticDataset { samples };
    ds.validate()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DatasetSpec {
        DatasetSpec { real_count: 3, fake_count: 2, sequence_length: 2, ..DatasetSpec::default() }
    }

    #[test]
    fn deterministic_and_labelled() {
        let a = generate_synthetic(&small(), 5).unwrap();
        let b = generate_synthetic(&small(), 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.class_counts(), (3, 2));
        assert_ne!(a, generate_synthetic(&small(), 6).unwrap());
        let f = &a.samples[0].frames[0];
        assert_eq!((f.width, f.height, f.channels), (96, 96, 3));
        assert!(f.data.iter().all(|v| v.fract() == 0.0 && (0.0..=255.0).contains(v)));
    }

    #[test]
    fn zero_counts_rejected() {
        let spec = DatasetSpec { fake_count: 0, ..small() };
        assert!(generate_synthetic(&spec, 1).is_err());
    }

    #[test]
    fn contour_matches_shape() {
        let s = EarShape {
            center: [10.0, 20.0],
            a: 6.0,
            b: 3.0,
            theta: 0.0,
            wobble: 0.0,
            phase: 0.0,
            shading: 0.0,
        };
        let c = s.contour(4);
        assert!((c[0][0] - 13.0).abs() < 1e-12 && (c[1][1] - 26.0).abs() < 1e-12);
    }
}
