use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace must be 1, found {trace}")]
    TraceNotOne { trace: f64 },
    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("POVM element eigenvalues leave [0, 1]: [{min}, {max}]")]
    InvalidEffect { min: f64, max: f64 },
    #[error("POVM elements do not sum to the identity (max deviation {deviation:e})")]
    IncompleteMeasurement { deviation: f64 },
    #[error("measurement has no elements")]
    EmptyMeasurement,
    #[error("operator is not an orthogonal projector (deviation {deviation:e})")]
    NotProjector { deviation: f64 },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("measurement family has no members")]
    EmptyFamily,
    #[error("state family has no members")]
    EmptyStateFamily,
    #[error("probability vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{what} = {value} exceeds the cap {cap}")]
    TooLarge {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("traceless witness invalid: {0}")]
    InvalidWitness(String),
    #[error("strategy {strategy} is not available for {family} families")]
    UnsupportedStrategy {
        strategy: &'static str,
        family: &'static str,
    },
    #[error("net construction exhausted its budget after {samples} samples ({points} points)")]
    NetBudgetExhausted { samples: usize, points: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
