use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot mix quadratic extensions sqrt({0}) and sqrt({1})")]
    MixedExtensions(i64, i64),

    #[error("value {0} is not a plain rational")]
    NotRational(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("degenerate invariant form")]
    DegenerateForm,

    #[error("action leaves the module window at {0}")]
    WindowEscape(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("critical level: level + h^vee = 0")]
    CriticalLevel,

    #[error("generic level not allowed here: {0}")]
    GenericLevel(String),

    #[error("degree cutoff {cutoff} exceeded (needed {needed})")]
    CutoffExceeded { needed: usize, cutoff: usize },

    #[error("hom space is under-determined on the requested window: {0}")]
    UnderDetermined(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("invalid candidate input: {0}")]
    Candidate(String),

    #[error("recursion obstructed at degree {degree} on weight {weight}")]
    Obstructed { degree: usize, weight: String },

    #[error("independent evaluations disagree: {0}")]
    RouteMismatch(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
