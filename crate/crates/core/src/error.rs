use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("infinity has no continued fraction expansion")]
    InfiniteSlope,
    #[error("matrix does not have determinant 1")]
    Determinant,
    #[error("slope does not fit in 64-bit coordinates")]
    Overflow,
    #[error("projection to the annulus about {gamma} is undefined for {x}")]
    UndefinedProjection { gamma: String, x: String },
    #[error("{0} is not a marking: base and transversal must meet exactly once")]
    InvalidMarking(String),
    #[error("matrix is not hyperbolic (|trace| <= 2)")]
    NotHyperbolic,
    #[error("invalid twist word: {0}")]
    InvalidWord(String),
    #[error("invalid twist tuple: {0}")]
    InvalidTuple(String),
    #[error("search budget of {budget} exceeded")]
    Budget { budget: u64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
