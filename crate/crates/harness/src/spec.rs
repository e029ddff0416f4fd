//! Serde forms of scenarios, inputs, sets and target sets.

use std::fmt;
use std::path::PathBuf;

use oscillation_core::generate::{Domain, Field};
use oscillation_core::morphology::BallMode;
use oscillation_core::seminorm::SweepGrid;
use oscillation_core::{SetSpec, TargetSet};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", content = "params", rename_all = "lowercase")]
pub enum SetDto {
    Ball {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        closed: bool,
    },
    Annulus {
        center: Vec<f64>,
        inner: f64,
        outer: f64,
        #[serde(default)]
        inner_closed: bool,
        #[serde(default)]
        outer_closed: bool,
    },
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Union(Vec<SetDto>),
    Intersection(Vec<SetDto>),
    Complement(Box<SetDto>),
    Mask {
        origin: Vec<f64>,
        spacing: f64,
        shape: Vec<usize>,
        cells: Vec<u8>,
    },
}

impl From<&SetDto> for SetSpec {
    fn from(dto: &SetDto) -> Self {
        match dto {
            SetDto::Ball { center, radius, closed } => {
                SetSpec::Ball { center: center.clone(), radius: *radius, closed: *closed }
            }
            SetDto::Annulus { center, inner, outer, inner_closed, outer_closed } => SetSpec::Annulus {
                center: center.clone(),
                inner: *inner,
                outer: *outer,
                inner_closed: *inner_closed,
                outer_closed: *outer_closed,
            },
            SetDto::Box { min, max } => SetSpec::Box { min: min.clone(), max: max.clone() },
            SetDto::Halfspace { normal, offset } => SetSpec::HalfSpace { normal: normal.clone(), offset: *offset },
            SetDto::Union(parts) => SetSpec::Union(parts.iter().map(SetSpec::from).collect()),
            SetDto::Intersection(parts) => SetSpec::Intersection(parts.iter().map(SetSpec::from).collect()),
            SetDto::Complement(inner) => SetSpec::Complement(Box::new(SetSpec::from(inner.as_ref()))),
            SetDto::Mask { origin, spacing, shape, cells } => SetSpec::Mask {
                origin: origin.clone(),
                spacing: *spacing,
                shape: shape.clone(),
                cells: cells.iter().map(|&c| c != 0).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetDto {
    pub sites: Vec<Vec<f64>>,
}

impl TargetDto {
    pub fn build(&self) -> oscillation_core::Result<TargetSet> {
        TargetSet::new(self.sites.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeDto {
    #[default]
    Open,
    Closed,
}

impl From<ModeDto> for BallMode {
    fn from(m: ModeDto) -> Self {
        match m {
            ModeDto::Open => BallMode::Open,
            ModeDto::Closed => BallMode::Closed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepDto {
    Explicit { deltas: Vec<f64> },
    Geometric { min: f64, max: f64, ratio: f64 },
}

impl SweepDto {
    pub fn build(&self) -> oscillation_core::Result<SweepGrid> {
        match self {
            SweepDto::Explicit { deltas } => SweepGrid::explicit(deltas.clone()),
            SweepDto::Geometric { min, max, ratio } => SweepGrid::geometric(*min, *max, *ratio),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FieldDto {
    #[default]
    Uniform,
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DomainDto {
    #[default]
    Box,
    Ball,
}

fn default_modes() -> usize {
    5
}

fn default_frequency() -> f64 {
    8.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSpec {
    Constant {
        shape: Vec<usize>,
        spacing: f64,
        #[serde(default)]
        origin: Option<Vec<f64>>,
        value: f64,
    },
    /// Indicator of `[0, L] ∩ 4rℤ`.
    Lattice {
        length: f64,
        r: f64,
        h: f64,
    },
    /// Indicator of `{0}` on `[−N−1, −N+1] ∪ {0} ∪ [N−1, N+1]`.
    Disconnected {
        n: u32,
        h: f64,
    },
    Random {
        shape: Vec<usize>,
        spacing: f64,
        #[serde(default)]
        field: FieldDto,
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "default_frequency")]
        max_frequency: f64,
        #[serde(default)]
        domain: DomainDto,
        /// Defaults to the scenario seed.
        #[serde(default)]
        seed: Option<u64>,
    },
    File {
        path: PathBuf,
    },
}

impl InputSpec {
    pub fn field(&self) -> Option<(Field, Domain)> {
        match self {
            InputSpec::Random { field, modes, max_frequency, domain, .. } => Some((
                match field {
                    FieldDto::Uniform => Field::Uniform,
                    FieldDto::Smooth => Field::Smooth { modes: *modes, max_frequency: *max_frequency },
                },
                match domain {
                    DomainDto::Box => Domain::Box,
                    DomainDto::Ball => Domain::Ball,
                },
            )),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Sweep,
    Seminorm,
    Thm1,
    Thm2,
    Sandwich,
    Density,
    Continuity,
    Contraction,
    Derivative,
    Lemma3,
    Coarea,
    OpenClosed,
    Decomposition,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Sweep => "sweep",
            CheckKind::Seminorm => "seminorm",
            CheckKind::Thm1 => "thm1",
            CheckKind::Thm2 => "thm2",
            CheckKind::Sandwich => "sandwich",
            CheckKind::Density => "density",
            CheckKind::Continuity => "continuity",
            CheckKind::Contraction => "contraction",
            CheckKind::Derivative => "derivative",
            CheckKind::Lemma3 => "lemma3",
            CheckKind::Coarea => "coarea",
            CheckKind::OpenClosed => "open-closed",
            CheckKind::Decomposition => "decomposition",
        }
    }

    /// Whether the check reads the scenario's grid function.
    pub fn needs_grid(self) -> bool {
        matches!(
            self,
            CheckKind::Sweep
                | CheckKind::Seminorm
                | CheckKind::Thm1
                | CheckKind::Sandwich
                | CheckKind::Density
                | CheckKind::Continuity
                | CheckKind::OpenClosed
        )
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    #[default]
    Pass,
    Fail,
    HypothesisError,
}

/// Check parameters. Scenario-level values are defaults that each check
/// entry may override.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepDto>,
    /// Relative tolerance of the check (meaning depends on the check).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Reference value for `seminorm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull_volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned_r: Option<f64>,
    /// Number of random sites for `contraction` and `derivative`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    /// Number of random pairs or configurations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Number of radial slices for `coarea`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_samples: Option<usize>,
}

impl Params {
    /// `self` with unset fields taken from `defaults`.
    pub fn merged(&self, defaults: &Params) -> Params {
        macro_rules! pick {
            ($($f:ident),*) => { Params { $($f: self.$f.clone().or_else(|| defaults.$f.clone())),* } };
        }
        pick!(
            r,
            alpha,
            delta,
            mode,
            c,
            sweep,
            tolerance,
            expected,
            hull_volume,
            intervals,
            refine,
            target,
            set,
            samples,
            pinned_r,
            sites,
            count,
            steps,
            kappa,
            radii,
            angular_samples,
            probe_samples
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub check: CheckKind,
    #[serde(default)]
    pub expect: Expect,
    #[serde(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub input: Option<InputSpec>,
    #[serde(default)]
    pub params: Params,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Relative to the scenario file unless absolute.
    #[serde(default)]
    pub output: Option<PathBuf>,
}
