use thiserror::Error;

use crate::ahp::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix shape: {0}")]
    Shape(String),

    #[error("invalid judgment matrix: {0}")]
    InvalidMatrix(ValidationReport),

    #[error("degenerate weight at position {index} (all-zero row)")]
    DegenerateWeight { index: usize },

    #[error("oracle did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("RI undefined beyond order {max} (got order {order})")]
    RiUndefined { order: usize, max: usize },

    #[error("mapping collision at position {position}")]
    MappingCollision { position: usize },

    #[error("invalid weight mapping: {0}")]
    InvalidMapping(String),

    #[error("matrix file line {line}: {message}")]
    MatrixFile { line: usize, message: String },

    #[error("undated data: no DATE column in header")]
    UndatedData,

    #[error("time order: record {index} ({date}) is not after its predecessor")]
    TimeOrder { index: usize, date: chrono::NaiveDate },

    #[error("zero threshold denominator")]
    ZeroThresholdDenominator,

    #[error("contrast threshold out of range: {0}")]
    ContrastThreshold(f64),

    #[error("visibility must be positive, got {0}")]
    NonPositiveVisibility(f64),

    #[error("invalid base area: {0}")]
    InvalidBaseArea(f64),

    #[error("incomplete feature bundle: missing {}", .0.join(", "))]
    IncompleteBundle(Vec<&'static str>),

    #[error("{symbol} missing for {index}")]
    MissingSymbol {
        symbol: &'static str,
        index: &'static str,
    },

    #[error("area unit mismatch: {0} vs {1}")]
    AreaUnitMismatch(crate::planning::AreaUnit, crate::planning::AreaUnit),

    #[error("unknown variable `{name}`; valid names: {}", .valid.join(", "))]
    UnknownVariable {
        name: String,
        valid: Vec<&'static str>,
    },

    #[error("function not evaluable at stencil around x = {0}")]
    NotEvaluable(f64),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("insufficient history: need at least 3 points, got {0}")]
    InsufficientHistory(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
