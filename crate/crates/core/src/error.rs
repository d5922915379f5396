use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("mode {mode} out of range 1..={order}")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("invalid shape {0:?}: every dimension must be at least 1")]
    InvalidShape(Vec<usize>),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("requested rank {requested} at mode {mode} exceeds available rank {available}")]
    RankTooLarge {
        mode: usize,
        requested: usize,
        available: usize,
    },

    #[error("rank must be at least 1 (mode {mode})")]
    ZeroRank { mode: usize },

    #[error("singular value {index} of mode {mode} is zero; the scaling matrix is not invertible")]
    SingularSigma { mode: usize, index: usize },

    #[error("zero marginal at mode {mode}, index {index}")]
    ZeroMarginal { mode: usize, index: usize },

    #[error("table has no positive entry")]
    EmptyTable,

    #[error("invalid count {value} at flat position {position}")]
    InvalidCount { position: usize, value: f64 },

    #[error("invalid metric weight {value} at mode {mode}, index {index}")]
    InvalidWeight { mode: usize, index: usize, value: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("labels: {0}")]
    Labels(String),

    #[error("zero denominator")]
    ZeroDenominator,
}
