//! Campaign configuration: a TOML file whose sections mirror the model
//! types. Missing keys take their defaults, unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fit::{FitDomain, KappaMode};
use crate::optics::{CellGeometry, LadderConfig};
use crate::receiver::{NoiseBudget, Receiver, SuperhetConfig};
use crate::synth::FrequencyGrid;
use crate::transit::TransitParams;

/// The shipped default configuration, identical to `CampaignConfig::default()`.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../config/default.toml");

/// Power-law coefficient setting: a number, or `"free"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaSetting(pub KappaMode);

impl Serialize for KappaSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            KappaMode::Fixed(k) => s.serialize_f64(k),
            KappaMode::Free => s.serialize_str("free"),
        }
    }
}

impl<'de> Deserialize<'de> for KappaSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Value(f64),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Value(k) => Ok(KappaSetting(KappaMode::Fixed(k))),
            Repr::Word(w) if w == "free" => Ok(KappaSetting(KappaMode::Free)),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a number or \"free\", got \"{w}\""
            ))),
        }
    }
}

/// Sweep, statistics and fitting settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Interaction lengths in mm.
    pub lengths_mm: Vec<f64>,
    /// Number of independent synthetic runs.
    pub seeds: u32,
    /// First seed; runs use `base_seed .. base_seed + seeds`.
    pub base_seed: u64,
    /// Analyzer resolution bandwidth (Hz).
    pub rbw_hz: f64,
    /// Periodograms averaged per bin.
    pub n_avg: u32,
    /// Section width for the A/P₀ reduction (Hz).
    pub section_width_hz: f64,
    /// Power-law coefficient for the per-section fits.
    pub kappa: KappaSetting,
    pub fit_domain: FitDomain,
    pub out_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lengths_mm: vec![7.28, 8.405, 9.53, 10.655, 11.78, 12.905, 14.03, 15.155, 16.28],
            seeds: 5,
            base_seed: 1,
            rbw_hz: 1.0,
            n_avg: 10_000,
            section_width_hz: 1000.0,
            kappa: KappaSetting(KappaMode::Fixed(0.5)),
            fit_domain: FitDomain::Linear,
            out_dir: PathBuf::from("campaign"),
        }
    }
}

impl SweepConfig {
    pub fn seed_list(&self) -> Vec<u64> {
        (0..u64::from(self.seeds)).map(|k| self.base_seed + k).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    pub sweep: SweepConfig,
    pub grid: FrequencyGrid,
    pub transit: TransitParams,
    pub eit: LadderConfig,
    pub atcal: LadderConfig,
    pub cell: CellGeometry,
    pub noise: NoiseBudget,
    pub superhet: SuperhetConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            sweep: SweepConfig::default(),
            grid: FrequencyGrid::default(),
            transit: TransitParams::default(),
            eit: LadderConfig::default(),
            atcal: LadderConfig::autler_townes(),
            cell: CellGeometry::default(),
            noise: NoiseBudget::default(),
            superhet: SuperhetConfig::default(),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        if s.lengths_mm.is_empty() {
            return Err(Error::validation("sweep.lengths_mm", "must not be empty"));
        }
        if let Some(l) = s.lengths_mm.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::validation(
                "sweep.lengths_mm",
                format!("lengths must be > 0, got {l}"),
            ));
        }
        if s.seeds == 0 {
            return Err(Error::validation("sweep.seeds", "must be >= 1"));
        }
        if !(s.rbw_hz > 0.0 && s.rbw_hz.is_finite()) {
            return Err(Error::validation("sweep.rbw_hz", "must be > 0"));
        }
        if s.n_avg == 0 {
            return Err(Error::validation("sweep.n_avg", "must be >= 1"));
        }
        if !(s.section_width_hz > 0.0 && s.section_width_hz.is_finite()) {
            return Err(Error::validation("sweep.section_width_hz", "must be > 0"));
        }
        if let KappaMode::Fixed(k) = s.kappa.0 {
            if !(k > 0.0 && k < 1.5) {
                return Err(Error::validation("sweep.kappa", "must lie in (0, 1.5) or be \"free\""));
            }
        }
        self.grid.validate()?;
        self.transit.validate()?;
        self.eit.validate("eit")?;
        self.atcal.validate("atcal")?;
        self.cell.validate()?;
        self.noise.validate()?;
        self.superhet.validate()?;
        Ok(())
    }

    /// Receiver model assembled from the config sections.
    pub fn receiver(&self) -> Receiver {
        Receiver {
            ladder: self.eit,
            geometry: self.cell,
            superhet: self.superhet,
            transit: self.transit,
            budget: self.noise.clone(),
            rbw: self.sweep.rbw_hz,
        }
    }

    /// Serializes to TOML; `parse(dump())` reproduces the config exactly.
    pub fn dump(&self) -> String {
        toml::to_string_pretty(self).expect("config is always representable in TOML")
    }

    /// SHA-256 of the dumped config, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.dump().as_bytes()))
    }

    /// Parses and validates config text.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: CampaignConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |span| text[..span.start.min(text.len())].matches('\n').count() + 1);
            Error::ConfigParse {
                line,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<CampaignConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    CampaignConfig::parse(&text)
}
