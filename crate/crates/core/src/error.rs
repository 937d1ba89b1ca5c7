use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("k = {k} exceeds the available length {len}")]
    KMismatch { k: usize, len: usize },

    #[error("cannot certify {what} within the scan limit of {limit} entries")]
    HorizonExceeded { what: String, limit: usize },

    #[error("sequence is not summable: {0}")]
    NotSummable(String),

    #[error("c is not majorized by b (first violation at k = {k})")]
    NotMajorized { k: usize },

    #[error("operator is not positive definite (smallest spectral value {min})")]
    NotPositiveDefinite { min: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("pair is not frame admissible: {condition}")]
    NotAdmissible { condition: String },

    #[error("truncation at N = {n} is not admissible; {hint}")]
    TruncationInadmissible { n: usize, hint: String },

    #[error("sufficient conditions failed: {condition}")]
    SufficiencyFailed { condition: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("tail metadata contradicted at index {index}: {detail}")]
    MetadataContradiction { index: usize, detail: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable identifier of the condition that produced the error.
    pub fn condition_id(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::KMismatch { .. } => "k-mismatch",
            Error::HorizonExceeded { .. } => "horizon-exceeded",
            Error::NotSummable(_) => "not-summable",
            Error::NotMajorized { .. } => "not-majorized",
            Error::NotPositiveDefinite { .. } => "not-positive-definite",
            Error::NumericalFailure(_) => "numerical-failure",
            Error::NotAdmissible { .. } => "not-admissible",
            Error::TruncationInadmissible { .. } => "truncation-inadmissible",
            Error::SufficiencyFailed { .. } => "sufficiency-failed",
            Error::InvalidInput(_) => "invalid-input",
            Error::MetadataContradiction { .. } => "metadata-contradiction",
            Error::UnknownGenerator(_) => "unknown-generator",
            Error::UnknownExample(_) => "unknown-example",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
