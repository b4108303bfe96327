use thiserror::Error;

use crate::liealg::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("band mismatch: {0}")]
    BandMismatch(String),

    #[error("band too small: {0}")]
    BandTooSmall(String),

    #[error("grid would need {nodes} nodes, cap is {cap}")]
    Resource { nodes: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Casimir matrix is not scalar (off-scalar deviation {deviation:e})")]
    NotScalar { deviation: f64 },

    #[error("generators are not bracket generating: span stalls at {reached} of {dim} (dims {dims:?})")]
    NotHoermander {
        dims: Vec<usize>,
        reached: usize,
        dim: usize,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation error: {0}")]
    Validation(Violation),

    #[error("non-finite spectral value {value} at eigenvalue {eigenvalue}")]
    NonFinite { eigenvalue: f64, value: f64 },

    #[error(
        "truncation insufficient at L_max = {lmax}: last shell contributes {relative_shell:e} relatively"
    )]
    TruncationInsufficient { lmax: f64, relative_shell: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Validation-type failures (bad input, failed checks).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::Validation(_)
                | Error::InvalidParameter(_)
                | Error::Precondition(_)
                | Error::NotHoermander { .. }
                | Error::LengthMismatch { .. }
                | Error::BandMismatch(_)
                | Error::BandTooSmall(_)
                | Error::Unsupported(_)
                | Error::NotScalar { .. }
                | Error::NonFinite { .. }
        )
    }
}
