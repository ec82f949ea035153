//! JSON run configurations for the batch commands.
//!
//! Single-instance configs take a `source` object naming the channels: an
//! inline `scenario` or a `scenario_file`, optionally a `channels_file` with
//! fixed channel vectors, and a `seed` / `realization` pair for sampling.
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::beamforming::BfScheme;
use crate::core_analysis::DEFAULT_MAX_LINKS;
use crate::error::{Error, Result};
use crate::formation::OverheadModel;
use crate::scenario::{db_to_linear, sample_channels, snr_to_sigma2, ChannelFile, ChannelSet, NoisePower, Scenario};

/// Reads and parses a JSON config; errors carry the file name and the
/// parser's line and column.
pub fn load_config<T: DeserializeOwned + WithBase>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg: T = parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if let Some(dir) = path.parent() {
        cfg.set_base(dir);
    }
    Ok(cfg)
}

pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Configs that may hold paths relative to their own location.
pub trait WithBase {
    fn set_base(&mut self, dir: &Path);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ChannelSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels_file: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub realization: u64,
}

fn default_seed() -> u64 {
    1
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl ChannelSource {
    pub fn inline(scenario: Scenario, seed: u64) -> Self {
        ChannelSource { scenario: Some(scenario), seed, ..Default::default() }
    }

    fn set_base(&mut self, dir: &Path) {
        resolve(dir, &mut self.scenario_file);
        resolve(dir, &mut self.channels_file);
    }

    pub fn scenario(&self) -> Result<Scenario> {
        match (&self.scenario, &self.scenario_file) {
            (Some(s), None) => {
                s.validate()?;
                Ok(s.clone())
            }
            (None, Some(path)) => Scenario::load(path),
            (Some(_), Some(_)) => Err(Error::Config("give either `scenario` or `scenario_file`, not both".into())),
            (None, None) => Err(Error::Config("missing `scenario` or `scenario_file`".into())),
        }
    }

    /// Fixed channels from `channels_file`, otherwise a sample for
    /// `(seed, realization)`.
    pub fn channels(&self, scenario: &Scenario) -> Result<ChannelSet> {
        match &self.channels_file {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                let file: ChannelFile =
                    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                let ch = ChannelSet::from_file(file)?;
                if ch.num_links() != scenario.links {
                    return Err(Error::Config(format!(
                        "{} holds {} links, scenario has {}",
                        path.display(),
                        ch.num_links(),
                        scenario.links
                    )));
                }
                Ok(ch)
            }
            None => sample_channels(scenario, self.seed, self.realization),
        }
    }
}

/// Noise given either directly or through a transmit SNR in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSpec {
    SnrDb(f64),
    Sigma2(f64),
}

impl NoiseSpec {
    pub fn noise(self, scenario: &Scenario) -> Result<NoisePower> {
        match self {
            NoiseSpec::SnrDb(db) => snr_to_sigma2(scenario, db_to_linear(db)),
            NoiseSpec::Sigma2(s) => NoisePower::new(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsConfig {
    pub source: ChannelSource,
    /// Uniform overheads to tabulate.
    pub epsilon: Vec<f64>,
    #[serde(default = "default_max_links")]
    pub max_links: usize,
}

fn default_max_links() -> usize {
    DEFAULT_MAX_LINKS
}

impl WithBase for ThresholdsConfig {
    fn set_base(&mut self, dir: &Path) {
        self.source.set_base(dir);
    }
}

impl ThresholdsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_empty() {
            return Err(Error::Config("`epsilon` must not be empty".into()));
        }
        if let Some(e) = self.epsilon.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::Config(format!("overheads must be finite and nonnegative, got {e}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationRunConfig {
    pub source: ChannelSource,
    pub noise: NoiseSpec,
    pub q: usize,
    pub scheme: BfScheme,
    #[serde(default)]
    pub overhead: OverheadModel,
}

impl WithBase for FormationRunConfig {
    fn set_base(&mut self, dir: &Path) {
        self.source.set_base(dir);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_file: Option<PathBuf>,
    pub snr_db: Vec<f64>,
    pub realizations: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub schemes: Vec<BfScheme>,
    pub q_values: Vec<usize>,
    #[serde(default = "default_overheads")]
    pub overheads: Vec<OverheadModel>,
    #[serde(default = "default_max_links")]
    pub max_links: usize,
}

fn default_overheads() -> Vec<OverheadModel> {
    vec![OverheadModel::Zero]
}

impl WithBase for SweepConfig {
    fn set_base(&mut self, dir: &Path) {
        resolve(dir, &mut self.scenario_file);
    }
}

impl SweepConfig {
    /// The default desk-scale profile: 8 links with 8 antennas each.
    pub fn desk_scale(snr_db: Vec<f64>, q_values: Vec<usize>, realizations: u64, seed: u64) -> Self {
        SweepConfig {
            scenario: Some(Scenario::iid(8, 8)),
            scenario_file: None,
            snr_db,
            realizations,
            seed,
            schemes: vec![BfScheme::Zf, BfScheme::Wf],
            q_values,
            overheads: default_overheads(),
            max_links: DEFAULT_MAX_LINKS,
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        ChannelSource {
            scenario: self.scenario.clone(),
            scenario_file: self.scenario_file.clone(),
            ..Default::default()
        }
        .scenario()
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("snr_db", self.snr_db.is_empty()),
            ("schemes", self.schemes.is_empty()),
            ("q_values", self.q_values.is_empty()),
            ("overheads", self.overheads.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Config(format!("`{name}` must not be empty")));
        }
        if self.realizations == 0 {
            return Err(Error::Config("`realizations` must be at least 1".into()));
        }
        if let Some(q) = self.q_values.iter().find(|q| **q < 2) {
            return Err(Error::Config(format!("q must be at least 2, got {q}")));
        }
        if let Some(s) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("SNR values must be finite, got {s}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityConfig {
    #[serde(default = "default_ks")]
    pub links: Vec<usize>,
    #[serde(default = "default_qs")]
    pub q_values: Vec<usize>,
}

fn default_ks() -> Vec<usize> {
    (2..=12).collect()
}

fn default_qs() -> Vec<usize> {
    vec![2, 3, 4, 8]
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        ComplexityConfig { links: default_ks(), q_values: default_qs() }
    }
}

impl WithBase for ComplexityConfig {
    fn set_base(&mut self, _dir: &Path) {}
}
