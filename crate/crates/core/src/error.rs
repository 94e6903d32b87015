use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("explicit samples cover indices {available_lo}..={available_hi}, requested {lo}..={hi}")]
    ExplicitOutOfRange {
        lo: i64,
        hi: i64,
        available_lo: i64,
        available_hi: i64,
    },

    #[error("invalid index range {lo}..={hi}")]
    InvalidRange { lo: i64, hi: i64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("tolerance {tol:e} is below the round-off floor {floor:e} for this matrix")]
    TolTooSmall { tol: f64, floor: f64 },

    #[error("endpoint {value} lies within {radius:e} of a reported eigenvalue")]
    UnresolvedEndpoint { value: f64, radius: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of numerical certification, as opposed to bad input.
    pub fn is_certification_failure(&self) -> bool {
        matches!(self, Error::TolTooSmall { .. } | Error::UnresolvedEndpoint { .. })
    }
}
