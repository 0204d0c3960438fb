//! Experiment configuration: a single TOML file, fully validated before
//! any computation runs. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Apply,
    AnalyzeSymbol,
    ValidatePhase,
    EstimateNorm,
    Transference,
    TruncationSweep,
    DispersiveSweep,
    GaussianLimit,
}

impl Subcommand {
    pub fn dir_name(&self) -> &'static str {
        match self {
            Subcommand::Apply => "apply",
            Subcommand::AnalyzeSymbol => "analyze-symbol",
            Subcommand::ValidatePhase => "validate-phase",
            Subcommand::EstimateNorm => "estimate-norm",
            Subcommand::Transference => "transference",
            Subcommand::TruncationSweep => "truncation-sweep",
            Subcommand::DispersiveSweep => "dispersive-sweep",
            Subcommand::GaussianLimit => "gaussian-limit",
        }
    }
}

/// A named registry entry with numeric parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub budget: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { budget: 256 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub cutoffs: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    pub eps: Vec<f64>,
    /// Hoelder split for pairings; both present or both absent.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Probe modes for pairings; presence switches the subcommand from
    /// limit terms to the pairing sequence.
    pub mode_m: Option<i64>,
    pub mode_k: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersiveConfig {
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub support_constant: Option<f64>,
    /// Ceiling on |alpha|, |beta| in the decay tables.
    #[serde(default = "default_ceiling")]
    pub ceiling: usize,
    /// Skip hypothesis validation before the sweep.
    #[serde(default)]
    pub waive_validation: bool,
}

fn default_ceiling() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub order: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_max_alpha")]
    pub max_alpha: usize,
    #[serde(default = "default_max_beta")]
    pub max_beta: usize,
}

fn default_rho() -> f64 {
    1.0
}
fn default_max_alpha() -> usize {
    2
}
fn default_max_beta() -> usize {
    1
}

/// The whole experiment file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    pub dimension: usize,
    /// Grid points per axis, N.
    pub grid: usize,
    /// Frequency cutoff, Xi.
    pub cutoff: i64,
    #[serde(default = "default_p")]
    pub p: f64,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub phase: Option<EntryConfig>,
    #[serde(default)]
    pub symbol: Option<EntryConfig>,
    #[serde(default)]
    pub input: Option<EntryConfig>,
    #[serde(default)]
    pub probe: Option<ProbeConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub gaussian: Option<GaussianConfig>,
    #[serde(default)]
    pub dispersive: Option<DispersiveConfig>,
    #[serde(default)]
    pub class: Option<ClassConfig>,
    /// Sample budget for phase validation.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_p() -> f64 {
    2.0
}
fn default_output_dir() -> String {
    "out".into()
}
fn default_samples() -> usize {
    1000
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Structural validation before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 || self.dimension > 3 {
            return Err(Error::Config(format!(
                "dimension must be 1..=3, got {}",
                self.dimension
            )));
        }
        if self.grid < 4 || self.grid % 2 != 0 {
            return Err(Error::Config(format!(
                "grid must be an even integer >= 4, got {}",
                self.grid
            )));
        }
        if self.cutoff < 0 || 2 * self.cutoff + 1 > self.grid as i64 {
            return Err(Error::Config(format!(
                "cutoff {} does not fit grid {}",
                self.cutoff, self.grid
            )));
        }
        if !(self.p >= 1.0) {
            return Err(Error::Config(format!("p must be >= 1, got {}", self.p)));
        }
        let need = |cond: bool, what: &str| -> Result<()> {
            if cond {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "subcommand {:?} requires {what}",
                    self.subcommand
                )))
            }
        };
        match self.subcommand {
            Subcommand::Apply => {
                need(self.symbol.is_some(), "a [symbol] block")?;
                need(self.phase.is_some(), "a [phase] block")?;
                need(self.input.is_some(), "an [input] block")?;
            }
            Subcommand::AnalyzeSymbol => {
                need(self.symbol.is_some(), "a [symbol] block")?;
            }
            Subcommand::ValidatePhase => {
                need(self.phase.is_some(), "a [phase] block")?;
                need(self.samples >= 1000, "samples >= 1000")?;
            }
            Subcommand::EstimateNorm => {
                need(self.symbol.is_some(), "a [symbol] block")?;
                need(self.phase.is_some(), "a [phase] block")?;
            }
            Subcommand::Transference => {
                need(self.symbol.is_some(), "a [symbol] block")?;
                need(self.phase.is_some(), "a [phase] block")?;
                need(self.dimension == 1, "dimension = 1")?;
            }
            Subcommand::TruncationSweep => {
                need(self.phase.is_some(), "a [phase] block")?;
                need(self.symbol.is_some(), "a [symbol] block")?;
                let sweep = self
                    .sweep
                    .as_ref()
                    .ok_or_else(|| Error::Config("truncation-sweep requires [sweep]".into()))?;
                need(sweep.cutoffs.len() >= 3, "at least 3 cutoffs")?;
            }
            Subcommand::DispersiveSweep => {
                need(self.phase.is_some(), "a [phase] block")?;
                need(self.symbol.is_some(), "a [symbol] block")?;
                let d = self
                    .dispersive
                    .as_ref()
                    .ok_or_else(|| Error::Config("dispersive-sweep requires [dispersive]".into()))?;
                need(!d.t_grid.is_empty(), "a nonempty t_grid")?;
                need(
                    d.t_grid.iter().all(|&t| t > 0.0),
                    "strictly positive times",
                )?;
            }
            Subcommand::GaussianLimit => {
                let g = self
                    .gaussian
                    .as_ref()
                    .ok_or_else(|| Error::Config("gaussian-limit requires [gaussian]".into()))?;
                need(!g.eps.is_empty(), "a nonempty eps list")?;
                let pairing_fields =
                    [g.alpha.is_some(), g.beta.is_some(), g.mode_m.is_some(), g.mode_k.is_some()];
                let count = pairing_fields.iter().filter(|&&b| b).count();
                if count != 0 && count != 4 {
                    return Err(Error::Config(
                        "pairing needs all of alpha, beta, mode_m, mode_k (or none)".into(),
                    ));
                }
                if count == 4 {
                    need(self.symbol.is_some(), "a [symbol] block for the pairing")?;
                } else {
                    need(self.input.is_some(), "an [input] block for the limit")?;
                }
            }
        }
        Ok(())
    }

    /// Canonical serialization used for hashing.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
