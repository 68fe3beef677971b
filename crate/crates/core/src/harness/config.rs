use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bcg::PipelineConfig;
use crate::error::{Error, Result};
use crate::evolution::GaConfig;
use crate::nn::CnnGenome;

/// Parameters of `synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_validation: usize,
    pub n_external: usize,
    /// Sessions per validation subject; external subjects get one.
    pub sessions: usize,
    pub session_minutes: f64,
    pub noise_std: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_validation: 12,
            n_external: 10,
            sessions: 3,
            session_minutes: 10.0,
            noise_std: 0.5,
        }
    }
}

/// Everything a run depends on besides the dataset. Loaded from one JSON
/// file; missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset_root: PathBuf,
    pub pipeline: PipelineConfig,
    pub ga: GaConfig,
    /// Network used by `enroll` unless a GA-selected genome is supplied.
    pub genome: CnnGenome,
    pub s_values: Vec<usize>,
    /// Sessions to report on; empty means every session in the dataset.
    pub sessions: Vec<String>,
    /// Session whose first minutes are used for training and tuning.
    pub enroll_session: String,
    pub enroll_minutes: f64,
    pub tune_minutes: f64,
    pub seed: u64,
    pub synth: SynthConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset_root: PathBuf::from("data"),
            pipeline: PipelineConfig::default(),
            ga: GaConfig::default(),
            genome: CnnGenome::default(),
            s_values: vec![1, 3, 5, 7],
            sessions: Vec::new(),
            enroll_session: "s1".into(),
            enroll_minutes: 8.0,
            tune_minutes: 2.0,
            seed: 0,
            synth: SynthConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn enroll_seconds(&self) -> usize {
        (self.enroll_minutes * 60.0).round() as usize
    }

    pub fn tune_seconds(&self) -> usize {
        (self.tune_minutes * 60.0).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.ga.validate()?;
        for (name, minutes) in [("enroll_minutes", self.enroll_minutes), ("tune_minutes", self.tune_minutes)] {
            let secs = minutes * 60.0;
            if !(secs >= 1.0 && (secs - secs.round()).abs() < 1e-9) {
                return Err(Error::Config(format!("{name} must be a positive whole number of seconds")));
            }
        }
        let w = self.pipeline.w_s;
        if self.enroll_seconds() < w || self.tune_seconds() < w {
            return Err(Error::Config(format!(
                "enroll and tune spans must each hold at least one {w} s segment"
            )));
        }
        if self.s_values.is_empty() || self.s_values.contains(&0) {
            return Err(Error::Config("s_values must be non-empty and positive".into()));
        }
        let s = &self.synth;
        if s.n_validation < 2 || s.sessions < 1 {
            return Err(Error::Config(
                "synth needs at least 2 validation subjects and 1 session".into(),
            ));
        }
        if !(s.session_minutes > 0.0 && s.noise_std >= 0.0) {
            return Err(Error::Config("synth session_minutes must be positive and noise_std non-negative".into()));
        }
        Ok(())
    }
}
