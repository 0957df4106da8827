use thiserror::Error;

/// Which of the two paired sequences an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sequence {
    First,
    Second,
}

impl std::fmt::Display for Sequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sequence::First => write!(f, "t1"),
            Sequence::Second => write!(f, "t2"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("need at least {required} paired values, got {got}")]
    TooFewPoints { required: usize, got: usize },

    #[error("sequences have different lengths ({len1} vs {len2})")]
    LengthMismatch { len1: usize, len2: usize },

    #[error("non-finite value {value} in {sequence} at index {index}")]
    NonFiniteValue {
        sequence: Sequence,
        index: usize,
        value: f64,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("survival function {sequence} returned {value} at {at}, outside [0, 1]")]
    InvalidSurvival {
        sequence: Sequence,
        at: f64,
        value: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid calibration: {0}")]
    InvalidCalibration(String),

    #[error("count overflow: {0}")]
    CountOverflow(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
