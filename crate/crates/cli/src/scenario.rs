//! Scenario file schema (TOML).

use std::collections::BTreeMap;
use std::fmt;

use cstar_fusion::ScalarKind;
use serde::{Deserialize, Serialize};

/// A scalar written as `x`, `[re, im]` or `[w, x, y, z]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
    Quaternion([f64; 4]),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: Option<u64>,
    pub algebra: AlgebraSpec,
    pub module: Option<ModuleSpec>,
    #[serde(default)]
    pub submodules: BTreeMap<String, SubmoduleSpec>,
    /// One row per frame member, one column per fiber.
    #[serde(default)]
    pub weights: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default)]
    pub frames: BTreeMap<String, FrameSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    pub perturbations: BTreeMap<String, PerturbationSpec>,
    #[serde(default)]
    pub commands: Vec<CommandSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub kind: ScalarKind,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub dims: Vec<usize>,
}

/// Exactly one of the three forms.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmoduleSpec {
    /// Fiber indices (0-based) carried in full.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
    /// Per fiber, a list of spanning vectors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<Vec<Vec<Vec<Scalar>>>>,
    /// Name of another submodule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complement: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    pub submodules: Vec<String>,
    pub weights: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub scales: Vec<f64>,
    /// One per fiber; identity when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<Vec<RotationSpec>>,
}

/// At most one field set; an empty table is the identity.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSpec {
    /// Row-major unitary matrix.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Scalar>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quaternion: Option<[f64; 4]>,
    /// `[i, j, angle]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub givens: Option<(usize, usize, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub theta_max: f64,
}

/// Target frame plus exactly one of `candidates`, `random` or `budget`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub frame: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<String>>,
    /// Givens rotations with angles uniform in `[0, theta_max]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomSpec>,
    /// Random rotations sized to keep the ecart within this fraction of the threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    /// Hölder exponent for the third angle criterion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    CheckFrame,
    Bounds,
    Reconstruct,
    Tightness,
    Multiplier,
    Cone,
    Transport,
    Perturb,
    VerifyOracle,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::CheckFrame => "check-frame",
            CommandName::Bounds => "bounds",
            CommandName::Reconstruct => "reconstruct",
            CommandName::Tightness => "tightness",
            CommandName::Multiplier => "multiplier",
            CommandName::Cone => "cone",
            CommandName::Transport => "transport",
            CommandName::Perturb => "perturb",
            CommandName::VerifyOracle => "verify-oracle",
        }
    }
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandSpec {
    pub run: CommandName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    /// Input for `reconstruct`, one list of scalars per fiber; random when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<Vec<Scalar>>>,
    /// Second weight set for `cone`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
    /// Positive rescaling for `cone`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<String>,
    /// Sample count for `verify-oracle`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Relative tolerance for `tightness`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// Byte offset to 1-based line and column.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}
