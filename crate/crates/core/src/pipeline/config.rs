use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dbn::PretrainConfig;
use crate::error::{Error, Result};
use crate::fusion::{DenominatorReading, DEFAULT_THRESHOLD};
use crate::sujfo::{Mode, SwarmConfig};

/// Synthetic ear-video generator settings. Geometry is in pixels of the
/// generated frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    pub real_count: usize,
    pub fake_count: usize,
    pub sequence_length: usize,
    pub width: usize,
    pub height: usize,
    /// Mean ear semi-major axis (vertical).
    pub ear_size: f64,
    pub ear_size_sd: f64,
    /// Mean height/width ratio of real ears.
    pub aspect: f64,
    pub aspect_sd: f64,
    /// Standard deviation of the per-video head tilt, in radians.
    pub tilt_sd: f64,
    /// Added to the aspect ratio of fake ears.
    pub fake_aspect_offset: f64,
    /// Contour wobble amplitude (fraction of radius) for real / fake ears.
    pub wobble: f64,
    pub fake_wobble: f64,
    /// Frame-to-frame geometry jitter (fraction of size) for real / fake.
    pub jitter: f64,
    pub fake_jitter: f64,
    /// Added to the inner-ear intensity of fake ears.
    pub fake_shading_offset: f64,
    pub pixel_noise: f64,
    pub contour_points: usize,
    /// Read frames from a directory written by `generate` instead of
    /// synthesising them.
    pub data_dir: Option<PathBuf>,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            real_count: 60,
            fake_count: 60,
            sequence_length: 4,
            width: 96,
            height: 96,
            ear_size: 30.0,
            ear_size_sd: 2.5,
            aspect: 1.9,
            aspect_sd: 0.15,
            tilt_sd: 0.08,
            fake_aspect_offset: -0.3,
            wobble: 0.02,
            fake_wobble: 0.07,
            jitter: 0.01,
            fake_jitter: 0.04,
            fake_shading_offset: 35.0,
            pixel_noise: 6.0,
            contour_points: 32,
            data_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSpec {
    /// Side length frames are resized to before feature extraction.
    pub frame_size: usize,
    pub blur_sigma: f64,
    pub blur_radius: usize,
    /// Embedding grid `g` (the embedding has `g * g` entries).
    pub grid: usize,
    /// Appearance PCA components; 0 disables the appearance part.
    pub pca_components: usize,
    /// Side of the square ear patch fed to PCA.
    pub patch_size: usize,
    pub curvature_k: usize,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self {
            frame_size: crate::preprocess::TARGET_SIZE,
            blur_sigma: crate::preprocess::DEFAULT_BLUR_SIGMA,
            blur_radius: crate::preprocess::DEFAULT_BLUR_RADIUS,
            grid: 6,
            pca_components: 3,
            patch_size: 8,
            curvature_k: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub hidden: usize,
    /// DBN hidden layer sizes; the visible size is the feature dimension.
    pub dbn_hidden: Vec<usize>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self { hidden: 4, dbn_hidden: vec![8, 4] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestCase {
    None,
    Compression,
    Noise,
    PoseIllumination,
    Rotation,
}

impl TestCase {
    pub const ALL: [TestCase; 5] = [
        TestCase::None,
        TestCase::Compression,
        TestCase::Noise,
        TestCase::PoseIllumination,
        TestCase::Rotation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestCase::None => "none",
            TestCase::Compression => "compression",
            TestCase::Noise => "noise",
            TestCase::PoseIllumination => "pose_illumination",
            TestCase::Rotation => "rotation",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown test case {s:?}")))
    }
}

/// Per-case perturbation strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Severities {
    /// Quantiser bits; 0 disables.
    pub compression_bits: f64,
    /// Noise standard deviation as a fraction of the 0..255 range.
    pub noise_sigma: f64,
    /// Maximum relative contrast change; brightness and warp scale with it.
    pub pose_illumination: f64,
    /// Maximum rotation in degrees.
    pub rotation_degrees: f64,
}

impl Default for Severities {
    fn default() -> Self {
        Self {
            compression_bits: 4.0,
            noise_sigma: 10.0 / 255.0,
            pose_illumination: 0.2,
            rotation_degrees: 15.0,
        }
    }
}

impl Severities {
    pub fn for_case(&self, case: TestCase) -> f64 {
        match case {
            TestCase::None => 0.0,
            TestCase::Compression => self.compression_bits,
            TestCase::Noise => self.noise_sigma,
            TestCase::PoseIllumination => self.pose_illumination,
            TestCase::Rotation => self.rotation_degrees,
        }
    }
}

/// Model variants compared by `evaluate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    /// Full model tuned by the optimiser.
    SuJfo,
    /// Best candidate of the initial population, no iterations.
    NoOptimization,
    /// Only the ear geometry attributes as input.
    EarFeaturesOnly,
    /// Logistic sigmoid in place of hyper-sig in the embedding.
    ConventionalActivation,
}

impl Ablation {
    pub const ALL: [Ablation; 4] = [
        Ablation::SuJfo,
        Ablation::NoOptimization,
        Ablation::EarFeaturesOnly,
        Ablation::ConventionalActivation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ablation::SuJfo => "su_jfo",
            Ablation::NoOptimization => "no_optimization",
            Ablation::EarFeaturesOnly => "ear_features_only",
            Ablation::ConventionalActivation => "conventional_activation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub dataset: DatasetSpec,
    pub features: FeatureSpec,
    pub model: ModelSpec,
    pub pretrain: PretrainConfig,
    pub swarm: SwarmConfig,
    pub mode: Mode,
    /// Training share of the data, in percent.
    pub split_percent: f64,
    pub repetitions: usize,
    pub test_cases: Vec<TestCase>,
    pub severities: Severities,
    pub ablations: Vec<Ablation>,
    pub threshold: f64,
    pub reading: DenominatorReading,
    pub benchmark: BenchmarkSpec,
}

/// Settings of `benchmark-optimizer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSpec {
    /// Seeds per benchmark function and mode.
    pub seeds: usize,
    pub dimension: usize,
    pub iterations: usize,
    /// Seeds for the model-error objective, which is far more expensive.
    pub model_seeds: usize,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self { seeds: 25, dimension: 10, iterations: 500, model_seeds: 5 }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            dataset: DatasetSpec::default(),
            features: FeatureSpec::default(),
            model: ModelSpec::default(),
            pretrain: PretrainConfig::default(),
            swarm: SwarmConfig { max_iterations: 200, ..SwarmConfig::default() },
            mode: Mode::SuJfo,
            split_percent: 70.0,
            repetitions: 25,
            test_cases: TestCase::ALL.to_vec(),
            severities: Severities::default(),
            ablations: Ablation::ALL.to_vec(),
            threshold: DEFAULT_THRESHOLD,
            reading: DenominatorReading::default(),
            benchmark: BenchmarkSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        if d.real_count == 0 || d.fake_count == 0 {
            return Err(Error::config("both classes need at least one sample"));
        }
        if d.sequence_length == 0 {
            return Err(Error::config("sequence_length must be at least 1"));
        }
        if d.width < 16 || d.height < 16 {
            return Err(Error::config("frames must be at least 16x16"));
        }
        if d.contour_points < 5 {
            return Err(Error::config("contour_points must be at least 5"));
        }
        if !(self.split_percent > 0.0 && self.split_percent < 100.0) {
            return Err(Error::config("split_percent must lie in (0, 100)"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        let f = &self.features;
        if f.grid == 0 || f.frame_size < 8 || f.patch_size == 0 || f.curvature_k == 0 {
            return Err(Error::config("feature sizes must be positive"));
        }
        if self.model.hidden == 0 || self.model.dbn_hidden.is_empty() || self.model.dbn_hidden.contains(&0) {
            return Err(Error::config("model sizes must be positive"));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::config("threshold must lie in [0, 1]"));
        }
        let b = &self.benchmark;
        if b.seeds == 0 || b.dimension == 0 || b.iterations == 0 {
            return Err(Error::config("benchmark seeds, dimension and iterations must be positive"));
        }
        if self.mode == Mode::SuJfo && self.swarm.population < 4 {
            return Err(Error::config("the population update needs at least 4 candidates"));
        }
        self.swarm.validate()
    }

    /// Parse TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roundtrips_through_toml_and_json() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
        assert_eq!(RunConfig::parse(&serde_json::to_string(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn partial_toml_fills_defaults() {
        let c = RunConfig::parse("seed = 3\nrepetitions = 2\n[swarm]\nmax_iterations = 5\n").unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.swarm.max_iterations, 5);
        assert_eq!(c.swarm.population, 10);
        assert_eq!(c.dataset, DatasetSpec::default());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::parse("split_percent = 100.0").is_err());
        assert!(RunConfig::parse("repetitions = 0").is_err());
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(matches!(RunConfig::parse("seed = \"x\""), Err(Error::Config(_))));
    }

    #[test]
    fn test_case_names() {
        for c in TestCase::ALL {
            assert_eq!(TestCase::parse(c.name()).unwrap(), c);
        }
        assert!(TestCase::parse("blur").is_err());
    }
}
