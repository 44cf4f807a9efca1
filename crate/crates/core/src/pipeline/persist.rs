use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::config::{Ablation, RunConfig};
use super::extract::FeatureExtractor;
use super::train::TrainedModel;
use crate::error::{Error, Result};
use crate::fusion::FusionModel;
use crate::objective::ModelLayout;
use crate::sujfo::TraceRow;

const MAGIC: &[u8; 8] = b"JFUSEART";
const VERSION: u32 = 1;

/// A trained model together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub config: RunConfig,
    pub model: TrainedModel,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: RunConfig,
    ablation: Ablation,
    extractor: FeatureExtractor,
    layout: ModelLayout,
    fusion: FusionModel,
    trace: Vec<TraceRow>,
    training_error: f64,
}

impl Artifact {
    /// Layout: magic, version (u32 LE), header length (u64 LE), JSON header,
    /// weight count (u64 LE), weights as f64 LE.
    pub fn write(&self, mut w: impl Write) -> Result<()> {
        let m = &self.model;
        let header = Header {
            config: self.config.clone(),
            ablation: m.ablation,
            extractor: m.extractor.clone(),
            layout: m.layout.clone(),
            fusion: m.fusion,
            trace: m.trace.clone(),
            training_error: m.training_error,
        };
        let json = serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
        let weights = m.weights();
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(json.len() as u64).to_le_bytes())?;
        w.write_all(&json)?;
        w.write_all(&(weights.len() as u64).to_le_bytes())?;
        for x in weights {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a jellyfuse artifact".into()));
        }
        let version = u32::from_le_bytes(read_array(&mut r)?);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported artifact version {version}")));
        }
        let len = read_len(&mut r, 1 << 30)?;
        let mut json = vec![0u8; len];
        read_exact(&mut r, &mut json)?;
        let h: Header = serde_json::from_slice(&json).map_err(|e| Error::Format(e.to_string()))?;
        let n = read_len(&mut r, 1 << 28)?;
        if n != h.layout.len() {
            return Err(Error::Format(format!("expected {} weights, found {n}", h.layout.len())));
        }
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            weights.push(f64::from_le_bytes(read_array(&mut r)?));
        }
        let (bigru, dbn) = h.layout.split(&weights)?;
        let model = TrainedModel {
            ablation: h.ablation,
            extractor: h.extractor,
            layout: h.layout,
            bigru,
            dbn,
            fusion: h.fusion,
            trace: h.trace,
            training_error: h.training_error,
        };
        Ok(Artifact { config: h.config, model })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::read(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("artifact is truncated".into()),
        _ => Error::Io(e),
    })
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    read_exact(r, &mut b)?;
    Ok(b)
}

fn read_len(r: &mut impl Read, max: u64) -> Result<usize> {
    let n = u64::from_le_bytes(read_array(r)?);
    if n > max {
        return Err(Error::Format(format!("length field {n} is implausible")));
    }
    Ok(n as usize)
}
