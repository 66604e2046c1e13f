use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty {0}")]
    Empty(&'static str),

    #[error("entry {index} is not a valid probability: {value}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("distribution sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("row {row}, column {column}: invalid transition probability {value}")]
    InvalidEntry {
        row: usize,
        column: usize,
        value: f64,
    },

    #[error("row {row} sums to {sum}, expected 1")]
    RowNotStochastic { row: usize, sum: f64 },

    #[error("row {row} has {len} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("dimension mismatch: {what} ({left} vs {right})")]
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("channel needs at least two inputs, got {0}")]
    TooFewInputs(usize),

    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("probability vector is on the simplex boundary (min entry {min} < {threshold})")]
    BoundaryPoint { min: f64, threshold: f64 },

    #[error("column {column} has zero output probability but a nonzero Hessian contribution")]
    ZeroDenominator { column: usize },

    #[error("pencil is ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("all {0} samples were degenerate (I(X;Y) below threshold)")]
    AllSamplesDegenerate(usize),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("catastrophic-event probability {0} >= 0.5, memory retains no information")]
    MemoryUseless(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that describe a parameter regime with no solution,
    /// as opposed to malformed input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_) | Error::MemoryUseless(_) | Error::AllSamplesDegenerate(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    range: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
