use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why two frameworks cannot be combined into a common refinement.
#[derive(Clone, Debug, PartialEq)]
pub enum Incompatibility {
    /// Event projectors at the same time fail to commute.
    NonCommuting {
        time_index: usize,
        left: String,
        right: String,
        commutator: f64,
    },
    /// The product family exists but violates the consistency conditions.
    Inconsistent { violating_pairs: usize },
    /// The families do not share initial state, grid and schedule.
    Mismatched(String),
}

impl std::fmt::Display for Incompatibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Incompatibility::NonCommuting {
                time_index,
                left,
                right,
                commutator,
            } => write!(
                f,
                "non-commuting: {left} and {right} at time index {time_index} (‖[P,Q]‖ = {commutator:.3e})"
            ),
            Incompatibility::Inconsistent { violating_pairs } => {
                write!(f, "inconsistent: product family has {violating_pairs} interfering pairs")
            }
            Incompatibility::Mismatched(what) => write!(f, "mismatched families: {what}"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero-dimensional space")]
    EmptyDimension,
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("operator is not self-adjoint (deviation {deviation:.3e})")]
    NotSelfAdjoint { deviation: f64 },
    #[error("{label} is not a projector (deviation {deviation:.3e})")]
    NotProjector { label: String, deviation: f64 },
    #[error("invalid direction (theta {theta}, phi {phi})")]
    InvalidDirection { theta: f64, phi: f64 },
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
    #[error("invalid interval [{from}, {to}]")]
    InvalidInterval { from: f64, to: f64 },
    #[error("schedule segments overlap: [{0}, {1}) and [{2}, {3})")]
    OverlappingSegments(f64, f64, f64, f64),
    #[error("malformed family: {0}")]
    MalformedFamily(String),
    #[error("basis is not orthonormal and complete: {0}")]
    IncompleteBasis(String),
    #[error("family `{family}` is inconsistent; its probabilities are meaningless")]
    QueryOnInconsistentFamily { family: String },
    #[error("no framework contains both {left} and {right}: they do not commute")]
    IncompatibleProperties { left: String, right: String },
    #[error("propositions refer to different times ({0} vs {1})")]
    TimeMismatch(usize, usize),
    #[error("incompatible frameworks: {0}")]
    IncompatibleFrameworks(Incompatibility),
    #[error("malformed hidden-variable model: {0}")]
    MalformedModel(String),
}
