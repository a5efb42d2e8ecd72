use thiserror::Error;

/// Errors raised by ingestion, model evaluation and fitting.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetaError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no studies")]
    NoStudies,

    #[error("study {study}: events exceed group size")]
    EventsExceedSize { study: String },

    #[error("study {study}: {msg}")]
    InvalidStudy { study: String, msg: String },

    #[error("header does not match design {design}: expected `{expected}`, found `{found}`")]
    Header {
        design: String,
        expected: String,
        found: String,
    },

    #[error("mixed designs in one dataset")]
    MixedDesigns,

    #[error("study {study}: no events in any cell and the zero-cell policy rejects it")]
    ZeroCells { study: String },

    #[error("model {family} is not compatible with design {design}")]
    Incompatible { family: String, design: String },

    #[error("outcome {outcome} outside support {lo}..={hi}")]
    OutsideSupport { outcome: u64, lo: u64, hi: u64 },

    #[error("non-finite integrand value at node {0}")]
    NonFinite(f64),

    #[error("quadrature order {0} outside 1..=201")]
    QuadratureOrder(usize),

    #[error("empty support")]
    EmptySupport,

    #[error("marginal selection probability p = {0} unattainable")]
    Unattainable(f64),

    #[error("invalid probability {0}: must lie in (0, 1]")]
    InvalidProbability(f64),

    #[error("need at least 2 informative studies, found {0}")]
    TooFewStudies(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for MetaError {
    fn from(e: std::io::Error) -> Self {
        MetaError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MetaError>;
