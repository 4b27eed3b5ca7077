use thiserror::Error;

/// Errors raised by the algebra, extension, representation and jet modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported rank: su({0}) is not built in (supported: su(2), su(3))")]
    UnsupportedRank(usize),

    #[error("invalid algebra data: {identity} violated (residual {residual:e})")]
    InvalidAlgebra { identity: &'static str, residual: f64 },

    #[error("malformed algebra document: {0}")]
    MalformedAlgebra(String),

    #[error("unknown weight label {label} (representation dimension {dim})")]
    UnknownWeight { label: usize, dim: usize },

    #[error("algebra has no defining representation matrices")]
    NoRepresentation,

    #[error("Cartan generator {0} is not diagonal in the representation basis")]
    NonDiagonalCartan(usize),

    #[error("generator index {gen} out of range for algebra of dimension {dim}")]
    GeneratorOutOfRange { gen: usize, dim: usize },

    #[error("invalid harmonic index (l={l}, m={m}): requires l >= 0 and |m| <= l")]
    InvalidHarmonic { l: i32, m: i32 },

    #[error("singular evaluation: profile r^{power} at r = {r}")]
    SingularEvaluation { power: i32, r: f64 },

    #[error("field vector has length {got}, representation dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate trajectory: {0}")]
    DegenerateTrajectory(String),

    #[error("inconsistent cocycle context: {0}")]
    InconsistentContext(String),

    #[error("grade {grade} exceeds the cap {cap}")]
    GradeExceedsCap { grade: usize, cap: usize },

    #[error("unsupported lowest weight: {0}")]
    UnsupportedWeight(String),

    #[error("missing boundary function for multi-index {0:?}")]
    MissingBoundary([u32; 3]),

    #[error("invalid jet configuration: {0}")]
    InvalidJet(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
