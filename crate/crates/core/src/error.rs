use thiserror::Error;

use crate::oracle::PointId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-distance query on point {0}")]
    SelfQuery(PointId),

    #[error("point {0} has not been revealed to the strong oracle")]
    NotRevealed(PointId),

    #[error("point {0} is out of range for an instance of {1} points")]
    OutOfRange(PointId, usize),

    #[error("corruption probability {0} is outside the supported range {1}")]
    InvalidDelta(f64, &'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ground truth has no coordinates")]
    NoCoordinates,

    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("bad distance table file: {0}")]
    BadTableFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
