use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GptError {
    #[error("bit string of length {len} exceeds 64")]
    TooLong { len: usize },
    #[error("{what} = {value} exceeds the cap {cap}")]
    TooLarge {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("mixture weights sum to {0}, not 1")]
    NotNormalized(BigRational),
    #[error("mixture weight {0} is not positive")]
    NonPositiveWeight(BigRational),
    #[error("mixture is empty")]
    EmptyMixture,
    #[error("accepted string {string} does not have length {depth}")]
    WrongDepth { string: String, depth: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GptError>;
