use thiserror::Error;

/// Errors raised by the verification library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected {expected} possibility values, got {got}")]
    WrongArity { expected: usize, got: usize },

    #[error("possibility value {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },

    #[error("all possibility values are zero: at least one outcome must be possible")]
    AllZero,

    #[error("event set is empty")]
    EmptyEvent,

    #[error("category index {index} out of range for a universe of {k} categories")]
    BadCategory { index: usize, k: usize },

    #[error("invalid universe: {0}")]
    InvalidUniverse(String),

    #[error("universe has no climatology")]
    MissingClimatology,

    #[error("universe mismatch: expected {expected} categories, got {got}")]
    UniverseMismatch { expected: usize, got: usize },

    #[error("epsilon {0} must lie in (0, 0.5)")]
    InvalidEpsilon(f64),

    #[error("sample is empty")]
    EmptySample,

    #[error("threshold {threshold} must lie in 1..={max}")]
    BadThreshold { threshold: usize, max: usize },

    #[error("invalid tau grid: {0}")]
    InvalidTauGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("paired comparison requires identical observation sequences ({0})")]
    UnpairedSamples(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
