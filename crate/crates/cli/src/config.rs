//! Run configuration: TOML document, defaults, and flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qite_core::problem::BRUTE_FORCE_CAP;
use qite_core::qite::{AdaptiveDtau, AnsatzSpec, AnsatzVariant, DtauRule, LayerOrder, OffsetMode, QiteConfig, DEFAULT_RIDGE};

/// Ansatz variant plus the compression flag, as labelled in sweep outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum VariantLabel {
    P1A,
    P2A,
    ReducedZY,
    CompressedZY,
    ReducedXY,
    CompressedXY,
    UniversalReduced,
}

impl VariantLabel {
    /// Variant set compared in sweeps by default.
    pub const SWEEP_DEFAULT: [VariantLabel; 5] =
        [Self::ReducedZY, Self::CompressedZY, Self::CompressedXY, Self::P2A, Self::UniversalReduced];

    pub fn name(self) -> &'static str {
        match self {
            Self::P1A => "p1a",
            Self::P2A => "p2a",
            Self::ReducedZY => "reduced-zy",
            Self::CompressedZY => "compressed-zy",
            Self::ReducedXY => "reduced-xy",
            Self::CompressedXY => "compressed-xy",
            Self::UniversalReduced => "universal",
        }
    }

    pub fn variant(self) -> AnsatzVariant {
        match self {
            Self::P1A => AnsatzVariant::P1A,
            Self::P2A => AnsatzVariant::P2AFull,
            Self::ReducedZY | Self::CompressedZY => AnsatzVariant::ReducedZY,
            Self::ReducedXY | Self::CompressedXY => AnsatzVariant::ReducedXY,
            Self::UniversalReduced => AnsatzVariant::UniversalReduced,
        }
    }

    pub fn compressed(self) -> bool {
        matches!(self, Self::CompressedZY | Self::CompressedXY)
    }
}

impl fmt::Display for VariantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantLabel {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        Ok(match key.as_str() {
            "p1a" | "linear" => Self::P1A,
            "p2a" | "complete" | "completep2a" | "p2afull" => Self::P2A,
            "reducedzy" | "zy" => Self::ReducedZY,
            "compressedzy" => Self::CompressedZY,
            "reducedxy" | "xy" => Self::ReducedXY,
            "compressedxy" => Self::CompressedXY,
            "universal" | "universalreduced" => Self::UniversalReduced,
            _ => bail!("unknown variant '{s}' (expected p1a, p2a, reduced-zy, compressed-zy, reduced-xy, compressed-xy, universal)"),
        })
    }
}

impl TryFrom<String> for VariantLabel {
    type Error = anyhow::Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<VariantLabel> for String {
    fn from(v: VariantLabel) -> String {
        v.name().to_string()
    }
}

/// `heuristic`, `oracle`, or an explicit qubit index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PivotRepr", into = "PivotRepr")]
pub enum PivotPolicy {
    Explicit(usize),
    /// Lowest total weight.
    Heuristic,
    /// First ranked route selected in some ground state.
    Oracle,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PivotRepr {
    Index(usize),
    Name(String),
}

impl TryFrom<PivotRepr> for PivotPolicy {
    type Error = anyhow::Error;
    fn try_from(r: PivotRepr) -> Result<Self> {
        match r {
            PivotRepr::Index(k) => Ok(Self::Explicit(k)),
            PivotRepr::Name(s) => s.parse(),
        }
    }
}

impl From<PivotPolicy> for PivotRepr {
    fn from(p: PivotPolicy) -> Self {
        match p {
            PivotPolicy::Explicit(k) => PivotRepr::Index(k),
            PivotPolicy::Heuristic => PivotRepr::Name("heuristic".into()),
            PivotPolicy::Oracle => PivotRepr::Name("oracle".into()),
        }
    }
}

impl FromStr for PivotPolicy {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "heuristic" => Ok(Self::Heuristic),
            "oracle" => Ok(Self::Oracle),
            t => t.parse().map(Self::Explicit).with_context(|| format!("invalid pivot '{s}'")),
        }
    }
}

/// `file` keeps the instance's penalties, `conservative` uses the summed
/// costs, a number sets every penalty to it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PenaltyRepr", into = "PenaltyRepr")]
pub enum PenaltyPolicy {
    File,
    Conservative,
    Uniform(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PenaltyRepr {
    Value(f64),
    Name(String),
}

impl TryFrom<PenaltyRepr> for PenaltyPolicy {
    type Error = anyhow::Error;
    fn try_from(r: PenaltyRepr) -> Result<Self> {
        match r {
            PenaltyRepr::Value(v) => Ok(Self::Uniform(v)),
            PenaltyRepr::Name(s) => s.parse(),
        }
    }
}

impl From<PenaltyPolicy> for PenaltyRepr {
    fn from(p: PenaltyPolicy) -> Self {
        match p {
            PenaltyPolicy::File => PenaltyRepr::Name("file".into()),
            PenaltyPolicy::Conservative => PenaltyRepr::Name("conservative".into()),
            PenaltyPolicy::Uniform(v) => PenaltyRepr::Value(v),
        }
    }
}

impl FromStr for PenaltyPolicy {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "file" => Ok(Self::File),
            "conservative" => Ok(Self::Conservative),
            t => t.parse().map(Self::Uniform).with_context(|| format!("invalid penalty '{s}'")),
        }
    }
}

pub const DEFAULT_SOLVED_THRESHOLD: f64 = 0.01;

/// Everything needed to reproduce one QITE run on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub variant: VariantLabel,
    pub pivot: PivotPolicy,
    pub steps: usize,
    /// Fixed step size; mutually exclusive with `adaptive`.
    pub dtau: Option<f64>,
    pub adaptive: bool,
    pub ridge: f64,
    pub offset_mode: OffsetMode,
    pub layer_order: LayerOrder,
    pub early_stop: Option<f64>,
    pub solved_threshold: f64,
    /// `Some` selects sampled expectation values.
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub penalty: PenaltyPolicy,
    pub brute_force_cap: usize,
    pub compression_diagnostics: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            variant: VariantLabel::CompressedZY,
            pivot: PivotPolicy::Heuristic,
            steps: 50,
            dtau: None,
            adaptive: true,
            ridge: DEFAULT_RIDGE,
            offset_mode: OffsetMode::Subtract,
            layer_order: LayerOrder::RyFirst,
            early_stop: None,
            solved_threshold: DEFAULT_SOLVED_THRESHOLD,
            shots: None,
            seed: None,
            penalty: PenaltyPolicy::File,
            brute_force_cap: BRUTE_FORCE_CAP,
            compression_diagnostics: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dtau.is_some() && self.adaptive {
            bail!("dtau and adaptive are mutually exclusive");
        }
        if self.dtau.is_none() && !self.adaptive {
            bail!("either dtau or adaptive must be set");
        }
        if self.shots.is_some() && self.seed.is_none() {
            bail!("a seed is required in sampled mode");
        }
        if !(0.0..=1.0).contains(&self.solved_threshold) {
            bail!("solved threshold must lie in [0, 1]");
        }
        self.qite_config().validate()?;
        Ok(())
    }

    pub fn qite_config(&self) -> QiteConfig {
        QiteConfig {
            steps: self.steps,
            dtau: match self.dtau {
                Some(d) => DtauRule::Fixed(d),
                None => DtauRule::Adaptive(AdaptiveDtau::default()),
            },
            ridge: self.ridge,
            offset_mode: self.offset_mode,
            layer_order: self.layer_order,
            early_stop: self.early_stop,
            shots: self.shots,
            seed: self.seed.unwrap_or(0),
            compression_diagnostics: self.compression_diagnostics,
        }
    }

    pub fn ansatz(&self, pivot: Option<usize>) -> AnsatzSpec {
        AnsatzSpec {
            variant: self.variant.variant(),
            pivot,
            compressed: self.variant.compressed(),
            locality: None,
        }
    }
}

/// Fixture name or explicit overrides for the hardware models.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardwareSection {
    pub fixture: Option<String>,
    pub t_cnot: Option<f64>,
    pub t_measure: Option<f64>,
    pub t_feedback: Option<f64>,
    pub lambda_cnot: Option<f64>,
    pub lambda_meas: Option<f64>,
    pub lambda_idle: Option<f64>,
    pub n_max: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatmapSection {
    pub proportions: Option<Vec<f64>>,
    pub feedbacks: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub variants: Option<Vec<VariantLabel>>,
}

/// Top-level configuration document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub shots: Option<u64>,
    pub sampled: Option<bool>,
    pub run: RunConfig,
    pub sweep: SweepSection,
    pub hardware: HardwareSection,
    pub heatmap: HeatmapSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
