use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::TestCase;
use super::synth::{Sample, SyntheticDataset};
use crate::error::{Error, Result};
use crate::preprocess::{EarRegion, FrameBuffer};

/// Bilinear sample at continuous pixel-index coordinates, edges clamped.
fn sample_bilinear(f: &FrameBuffer, x: f64, y: f64, c: usize) -> f64 {
    let x = x.clamp(0.0, (f.width - 1) as f64);
    let y = y.clamp(0.0, (f.height - 1) as f64);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(f.width - 1), (y0 + 1).min(f.height - 1));
    let (fx, fy) = (x - x0 as f64, y - y0 as f64);
    let top = f.get(x0, y0, c) * (1.0 - fx) + f.get(x1, y0, c) * fx;
    let bot = f.get(x0, y1, c) * (1.0 - fx) + f.get(x1, y1, c) * fx;
    top * (1.0 - fy) + bot * fy
}

fn invert(m: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-12 {
        return Err(Error::domain("singular warp matrix"));
    }
    Ok([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

/// Warp by `p -> m (p - c) + c` about the frame centre, in the continuous
/// coordinates where pixel `i` spans `[i, i + 1)`.
pub fn warp_frame(frame: &FrameBuffer, m: [[f64; 2]; 2]) -> Result<FrameBuffer> {
    let inv = invert(m)?;
    let (cx, cy) = (frame.width as f64 / 2.0, frame.height as f64 / 2.0);
    let mut out = FrameBuffer::filled(frame.width, frame.height, frame.channels, 0.0);
    for y in 0..frame.height {
        for x in 0..frame.width {
            let (px, py) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            let sx = inv[0][0] * px + inv[0][1] * py + cx - 0.5;
            let sy = inv[1][0] * px + inv[1][1] * py + cy - 0.5;
            for c in 0..frame.channels {
                out.set(x, y, c, sample_bilinear(frame, sx, sy, c));
            }
        }
    }
    Ok(out)
}

fn warp_region(region: &EarRegion, m: [[f64; 2]; 2], width: usize, height: usize) -> EarRegion {
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    let t = [cx - m[0][0] * cx - m[0][1] * cy, cy - m[1][0] * cx - m[1][1] * cy];
    let mut r = region.transformed(m, t);
    r.clip_box(width, height);
    r
}

pub fn rotation_matrix(degrees: f64) -> [[f64; 2]; 2] {
    let (s, c) = degrees.to_radians().sin_cos();
    [[c, -s], [s, c]]
}

/// Rotate about the frame centre.
pub fn rotate_frame(frame: &FrameBuffer, degrees: f64) -> Result<FrameBuffer> {
    warp_frame(frame, rotation_matrix(degrees))
}

/// Uniform quantisation of a 0..255 frame to `2^bits` levels.
pub fn quantize(frame: &FrameBuffer, bits: u32) -> FrameBuffer {
    let levels = (1u64 << bits.min(16)) as f64 - 1.0;
    let data = frame
        .data
        .iter()
        .map(|v| ((v / 255.0).clamp(0.0, 1.0) * levels).round() / levels * 255.0)
        .collect();
    FrameBuffer { data, ..*frame }
}

fn warp_sample(s: &Sample, m: [[f64; 2]; 2]) -> Result<Sample> {
    let mut frames = Vec::with_capacity(s.frames.len());
    let mut regions = Vec::with_capacity(s.frames.len());
    for (f, r) in s.frames.iter().zip(&s.regions) {
        frames.push(warp_frame(f, m)?);
        regions.push(warp_region(r, m, f.width, f.height));
    }
    Ok(Sample { frames, regions, fake: s.fake })
}

/// Label-preserving perturbation of every sample.
///
/// * compression: quantise to `2^severity` levels (severity rounded);
/// * noise: add Gaussian noise with sd `severity * 255`, clipped;
/// * pose_illumination: contrast factor in `1 +- severity`, brightness
///   shift in `+- severity * 64`, and a random affine warp whose entries
///   deviate from identity by up to `severity / 4`;
/// * rotation: one angle per video, uniform in `+- severity` degrees.
///
/// Severity 0 returns the dataset unchanged.
pub fn apply_test_case(
    dataset: &SyntheticDataset,
    case: TestCase,
    severity: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SyntheticDataset> {
    if !(severity >= 0.0) || !severity.is_finite() {
        return Err(Error::domain("severity must be a non-negative number"));
    }
    if case == TestCase::None || severity == 0.0 {
        return Ok(dataset.clone());
    }
    let mut samples = Vec::with_capacity(dataset.len());
    for s in &dataset.samples {
        let out = match case {
            TestCase::None => unreachable!(),
            TestCase::Compression => {
                let bits = severity.round().max(1.0) as u32;
                Sample { frames: s.frames.iter().map(|f| quantize(f, bits)).collect(), ..s.clone() }
            }
            TestCase::Noise => {
                let n = Normal::new(0.0, severity * 255.0).expect("finite sd");
                let frames = s
                    .frames
                    .iter()
                    .map(|f| FrameBuffer {
                        data: f.data.iter().map(|v| (v + n.sample(rng)).clamp(0.0, 255.0)).collect(),
                        ..*f
                    })
                    .collect();
                Sample { frames, ..s.clone() }
            }
            TestCase::PoseIllumination => {
                let contrast = 1.0 + rng.random_range(-severity..=severity);
                let shift = rng.random_range(-severity..=severity) * 64.0;
                let e = severity / 4.0;
                let m = [
                    [1.0 + rng.random_range(-e..=e), rng.random_range(-e..=e)],
                    [rng.random_range(-e..=e), 1.0 + rng.random_range(-e..=e)],
                ];
                let mut w = warp_sample(s, m)?;
                for f in &mut w.frames {
                    for v in &mut f.data {
                        *v = ((*v - 127.5) * contrast + 127.5 + shift).clamp(0.0, 255.0);
                    }
                }
                w
            }
            TestCase::Rotation => {
                let angle = rng.random_range(-severity..=severity);
                warp_sample(s, rotation_matrix(angle))?
            }
        };
        samples.push(out);
    }
    Ok(SyntheticDataset { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{generate_synthetic, DatasetSpec};
    use rand::SeedableRng;

    fn ds() -> SyntheticDataset {
        let spec = DatasetSpec { real_count: 2, fake_count: 2, sequence_length: 2, ..DatasetSpec::default() };
        generate_synthetic(&spec, 3).unwrap()
    }

    #[test]
    fn zero_severity_is_identity() {
        let d = ds();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for case in TestCase::ALL {
            assert_eq!(apply_test_case(&d, case, 0.0, &mut rng).unwrap(), d);
        }
    }

    #[test]
    fn binary_compression() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let q = apply_test_case(&ds(), TestCase::Compression, 1.0, &mut rng).unwrap();
        assert!(q.samples.iter().flat_map(|s| &s.frames).flat_map(|f| &f.data).all(|&v| v == 0.0 || v == 255.0));
    }

    #[test]
    fn labels_and_counts_preserved() {
        let d = ds();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for case in TestCase::ALL {
            let p = apply_test_case(&d, case, 0.3, &mut rng).unwrap();
            assert_eq!(p.labels(), d.labels());
            assert!(p.validate().is_ok(), "{case:?}");
        }
        assert!(apply_test_case(&d, TestCase::Noise, -1.0, &mut rng).is_err());
    }

    #[test]
    fn half_turns_are_exact() {
        let f = FrameBuffer::from_fn(9, 7, |x, y| ((x * 13 + y * 5) % 17) as f64);
        let back = rotate_frame(&rotate_frame(&f, 180.0).unwrap(), -180.0).unwrap();
        assert!(back.data.iter().zip(&f.data).all(|(a, b)| (a - b).abs() < 1e-9));
        let full = rotate_frame(&f, 360.0).unwrap();
        assert!(full.data.iter().zip(&f.data).all(|(a, b)| (a - b).abs() < 1e-6));
    }
}
