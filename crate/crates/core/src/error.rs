use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The argument lies outside the domain of validity of a transform or formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The value lies outside the image of the transform being inverted.
    #[error("range error: {0}")]
    Range(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("transform grid is empty")]
    EmptyGrid,

    #[error("unknown distribution family: {0}")]
    UnknownFamily(String),

    #[error("invalid distribution parameters: {0}")]
    InvalidParameters(String),

    #[error("response must be strictly positive: y[{index}] = {value}")]
    NonPositiveResponse { index: usize, value: f64 },

    #[error("design matrix is rank deficient (lambda_min = {0:.3e})")]
    RankDeficient(f64),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty sample")]
    EmptySample,

    /// An iterative numeric routine failed to converge.
    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
