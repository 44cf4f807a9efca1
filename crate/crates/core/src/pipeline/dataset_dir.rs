//! On-disk dataset layout:
//!
//! ```text
//! labels.csv                 sample,label   (label 0 = real, 1 = fake)
//! <sample>/frame_000.png     one image per frame
//! <sample>/annotations.jsonl one EarRegion per frame, in frame order
//! ```

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::synth::{Sample, SyntheticDataset};
use crate::error::{Error, Result};
use crate::preprocess::io::{list_frames, read_annotations, read_frame, write_annotations, write_frame};

pub fn write_dataset(dir: &Path, dataset: &SyntheticDataset) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut labels = fs::File::create(dir.join("labels.csv"))?;
    writeln!(labels, "sample,label")?;
    for (i, s) in dataset.samples.iter().enumerate() {
        let name = format!("sample_{i:04}");
        let sub = dir.join(&name);
        fs::create_dir_all(&sub)?;
        for (k, f) in s.frames.iter().enumerate() {
            write_frame(&sub.join(format!("frame_{k:03}.png")), f)?;
        }
        write_annotations(fs::File::create(sub.join("annotations.jsonl"))?, &s.regions)?;
        writeln!(labels, "{name},{}", u8::from(s.fake))?;
    }
    Ok(())
}

pub fn read_dataset(dir: &Path) -> Result<SyntheticDataset> {
    let labels = fs::File::open(dir.join("labels.csv"))?;
    let mut samples = Vec::new();
    for (n, line) in BufReader::new(labels).lines().enumerate() {
        let line = line?;
        if n == 0 || line.trim().is_empty() {
            continue;
        }
        let (name, label) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("labels.csv line {}: expected `sample,label`", n + 1)))?;
        let fake = match label.trim() {
            "0" => false,
            "1" => true,
            other => return Err(Error::Format(format!("labels.csv line {}: bad label `{other}`", n + 1))),
        };
        let sub = dir.join(name.trim());
        let frames = list_frames(&sub)?.iter().map(|p| read_frame(p)).collect::<Result<Vec<_>>>()?;
        let regions = read_annotations(BufReader::new(fs::File::open(sub.join("annotations.jsonl"))?))?;
        samples.push(Sample { frames, regions, fake });
    }
    let ds = SyntheticDataset { samples };
    ds.validate()?;
    Ok(ds)
}
