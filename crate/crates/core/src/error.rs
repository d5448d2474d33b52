use thiserror::Error;

/// Every failure the library can report. Each variant has a stable
/// machine-readable code (see [`Error::code`]) used by the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the zero polynomial has every real as a root")]
    ZeroPolynomial,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("a tuple needs at least 2 components, got {0}")]
    TupleTooShort(usize),

    #[error("degree {degree} is below the required minimum {min}")]
    DegreeTooLow { degree: usize, min: usize },

    #[error("phase must be at least 1")]
    InvalidPhase,

    #[error("phase {phase} must be below the degree {degree}")]
    PhaseTooHigh { phase: usize, degree: usize },

    #[error("component {index} of the expansion is the zero polynomial; boundary is infinite")]
    DegenerateComponent { index: usize },

    #[error("boundary has {size} points, above the limit {limit}")]
    BoundaryTooLarge { size: u128, limit: usize },

    #[error("need at least 2 boundary points, got {0}")]
    InsufficientPoints(usize),

    #[error("all integrands vanish on every boundary interval (M = 0)")]
    DegenerateM,

    #[error("size mismatch: rotation acts on {rotation} points, boundary has {boundary}")]
    SizeMismatch { rotation: usize, boundary: usize },

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("cannot normalize a point of norm zero")]
    ZeroNorm,

    #[error("runner configuration: {0}")]
    InvalidRunners(String),

    #[error("equal-gap condition violated: max deviation {deviation} exceeds {tol}")]
    ConditionNotMet { deviation: f64, tol: f64 },

    #[error("speed {0} is not an integer")]
    NonIntegerSpeeds(f64),

    #[error("no stationary (speed 0) runner")]
    NoStationaryRunner,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::TupleTooShort(_) => "TupleTooShort",
            Error::DegreeTooLow { .. } => "DegreeTooLow",
            Error::InvalidPhase => "InvalidPhase",
            Error::PhaseTooHigh { .. } => "PhaseTooHigh",
            Error::DegenerateComponent { .. } => "DegenerateComponent",
            Error::BoundaryTooLarge { .. } => "BoundaryTooLarge",
            Error::InsufficientPoints(_) => "InsufficientPoints",
            Error::DegenerateM => "DegenerateM",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::ZeroNorm => "ZeroNorm",
            Error::InvalidRunners(_) => "InvalidRunners",
            Error::ConditionNotMet { .. } => "ConditionNotMet",
            Error::NonIntegerSpeeds(_) => "NonIntegerSpeeds",
            Error::NoStationaryRunner => "NoStationaryRunner",
            Error::Parse(_) => "ParseError",
            Error::UnknownKey(_) => "UnknownKey",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Input and configuration problems are usage errors; everything else
    /// is a domain error.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse(_) | Error::UnknownKey(_) | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
