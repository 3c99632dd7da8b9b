use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible Planck parameters: {0} vs {1}")]
    IncompatiblePlanck(String, String),

    #[error("{sub} is not a subalgebra of {parent}")]
    NotSubalgebra { sub: String, parent: String },

    #[error("{t} is not a unit modulo {n}")]
    NotAUnit { t: i64, n: usize },

    #[error("dimension {n} exceeds the dense limit {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {value} lies outside the grid extent [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("guard exceeded: {what} = {value} > {limit}")]
    TooLarge { what: &'static str, value: u64, limit: u64 },

    #[error("phase ratio is not exactly summable: {0}")]
    NotExactlySummable(String),

    #[error("insufficient data: need at least {needed} points, have {have}")]
    InsufficientData { needed: usize, have: usize },

    #[error("limit is not well-defined; tail differences {tail:?}")]
    NotWellDefined { tail: Vec<f64> },

    #[error("dimension {0} admits no observable sector (needs N divisible by 4)")]
    NoObservableSector(usize),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("syntax error at {line}:{column}: found {found}, expected one of {expected:?}")]
    Syntax {
        line: usize,
        column: usize,
        found: String,
        expected: Vec<String>,
    },

    #[error("unknown identifier '{name}' at {line}:{column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("unbound symbol '{0}'")]
    UnboundSymbol(String),

    #[error("ill-typed expression: {0}")]
    IllTyped(String),

    #[error("operator cannot be exponentiated: {0}")]
    NotExponentiable(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
