//! Frame, annotation and feature files.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use super::ear::EarRegion;
use super::features::FeatureVector;
#[cfg(feature = "io")]
use super::frame::FrameBuffer;
use crate::error::{Error, Result};

/// One JSON object per line; blank lines are ignored.
pub fn read_annotations(reader: impl BufRead) -> Result<Vec<EarRegion>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: EarRegion = serde_json::from_str(&line)
            .map_err(|e| Error::Format(format!("annotation line {}: {e}", i + 1)))?;
        out.push(r);
    }
    Ok(out)
}

pub fn write_annotations(mut w: impl Write, regions: &[EarRegion]) -> Result<()> {
    for r in regions {
        let line = serde_json::to_string(r).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Header `ircnn_0..,ea_0..,aam_0..` followed by one row per vector. All
/// vectors must share the first vector's dims.
pub fn write_features_csv(mut w: impl Write, features: &[FeatureVector]) -> Result<()> {
    let Some(first) = features.first() else {
        return Ok(());
    };
    let dims = first.dims();
    let mut header = Vec::new();
    for (prefix, n) in ["ircnn", "ea", "aam"].iter().zip(dims) {
        header.extend((0..n).map(|i| format!("{prefix}_{i}")));
    }
    writeln!(w, "{}", header.join(","))?;
    for f in features {
        if f.dims() != dims {
            return Err(Error::domain("feature vectors have inconsistent dims"));
        }
        let row: Vec<String> = f.concat().iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// PNG and PPM files in `dir`, sorted by file name.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "ppm" | "pgm"))
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Decode a PNG or PNM image into a frame with intensities in [0, 255].
/// Grayscale images keep one channel; everything else becomes RGB.
#[cfg(feature = "io")]
pub fn read_frame(path: &Path) -> Result<FrameBuffer> {
    let img = image::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if img.color().channel_count() <= 2 {
        let g = img.to_luma8();
        FrameBuffer::new(w, h, 1, g.into_raw().into_iter().map(f64::from).collect())
    } else {
        let rgb = img.to_rgb8();
        FrameBuffer::new(w, h, 3, rgb.into_raw().into_iter().map(f64::from).collect())
    }
}

/// Encode a frame (intensities in [0, 255]) by the path's extension.
#[cfg(feature = "io")]
pub fn write_frame(path: &Path, frame: &FrameBuffer) -> Result<()> {
    let bytes: Vec<u8> = frame.data.iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect();
    let (w, h) = (frame.width as u32, frame.height as u32);
    let res = if frame.channels == 1 {
        image::GrayImage::from_raw(w, h, bytes).map(|i| i.save(path))
    } else {
        image::RgbImage::from_raw(w, h, bytes).map(|i| i.save(path))
    };
    match res {
        Some(Ok(())) => Ok(()),
        Some(Err(e)) => Err(Error::Format(format!("{}: {e}", path.display()))),
        None => Err(Error::domain("frame buffer size mismatch")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{BoundingBox, Landmark};

    #[test]
    fn annotation_roundtrip() {
        let r = EarRegion {
            bbox: BoundingBox { x: 1.0, y: 2.0, w: 3.0, h: 4.0 },
            contour: vec![[0.5, 0.25]; 5],
            landmarks: vec![Landmark { name: "tragus".into(), point: [1.0, 1.0] }],
        };
        let mut buf = Vec::new();
        write_annotations(&mut buf, &[r.clone(), r.clone()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"box\""));
        assert_eq!(read_annotations(&buf[..]).unwrap(), vec![r.clone(), r]);
        assert!(matches!(read_annotations(&b"{oops\n"[..]), Err(Error::Format(_))));
    }

    #[test]
    fn feature_csv_header() {
        let f = FeatureVector { f_ircnn: vec![1.0, 2.0], f_ea: vec![3.0], f_aam: vec![] };
        let mut buf = Vec::new();
        write_features_csv(&mut buf, &[f.clone(), f]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "ircnn_0,ircnn_1,ea_0");
        assert_eq!(text.lines().nth(1).unwrap(), "1,2,3");
    }

    #[cfg(feature = "io")]
    #[test]
    fn frame_png_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let f = FrameBuffer::from_fn(5, 4, |x, y| (x * 40 + y * 7) as f64);
        let p = dir.path().join("a.png");
        write_frame(&p, &f).unwrap();
        assert_eq!(read_frame(&p).unwrap(), f);
        let rgb = FrameBuffer::new(2, 1, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let q = dir.path().join("b.ppm");
        write_frame(&q, &rgb).unwrap();
        assert_eq!(read_frame(&q).unwrap(), rgb);
        assert_eq!(list_frames(dir.path()).unwrap().len(), 2);
    }
}
