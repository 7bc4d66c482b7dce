use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("least-squares fit requested on an empty index set")]
    EmptySubset,
    #[error("index {index} out of range for {len} observations")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("regularization must be nonnegative, got {0}")]
    NegativeLambda(f64),
    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid noise model: {0}")]
    InvalidNoise(&'static str),
    #[error("trigonometric design requires an even dimension, got {0}")]
    OddDimension(usize),
    #[error("parameter lies outside the quadrature box at coordinate {0}")]
    OutsideBox(usize),
    #[error("invalid quadrature specification: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("degenerate data: {0}")]
    Degenerate(&'static str),
    #[error("sample size {n} does not exceed the threshold {threshold}")]
    SampleTooSmall { n: usize, threshold: f64 },
}
