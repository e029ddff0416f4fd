use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Structural problem with a grid description.
    Malformed(String),
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    NonFinite {
        index: usize,
    },
    InvalidSpacing(f64),
    EmptyMask,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    UnsupportedDimension {
        dim: usize,
        max: usize,
    },
    StencilBudget {
        count: usize,
        budget: usize,
    },
    EmptySweep,
    InvalidParameter(String),
    /// Parameters fall outside the hypothesis of the statement being checked.
    OutsideHypothesis(String),
    /// A sample point lies on the closure of the target set.
    OnTargetSet,
    RetriesExhausted {
        index: u64,
    },
    Internal(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::OutsideHypothesis(msg.into())
    }

    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, Error::OutsideHypothesis(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Malformed(msg) => write!(f, "malformed grid: {msg}"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected} values, found {found}")
            }
            Error::NonFinite { index } => write!(f, "non-finite value in masked cell {index}"),
            Error::InvalidSpacing(h) => write!(f, "grid spacing must be positive, got {h}"),
            Error::EmptyMask => f.write_str("grid has no masked cell"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::UnsupportedDimension { dim, max } => {
                write!(f, "unsupported dimension {dim} (maximum {max})")
            }
            Error::StencilBudget { count, budget } => {
                write!(f, "ball stencil needs {count} offsets, budget is {budget}")
            }
            Error::EmptySweep => f.write_str("empty δ sweep"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::OutsideHypothesis(msg) => write!(f, "outside lemma hypothesis: {msg}"),
            Error::OnTargetSet => f.write_str("point lies on the target set"),
            Error::RetriesExhausted { index } => {
                write!(f, "sample {index}: every retry landed on the target set")
            }
            Error::Internal(msg) => write!(f, "internal inconsistency: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
