use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    InvalidDimension(u32),

    #[error("{name} = {value} is outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: String,
    },

    #[error("channel normalization violated: {0}")]
    Normalization(String),

    #[error("channels have different alphabet sizes ({0} vs {1})")]
    DimensionMismatch(u32, u32),

    #[error("block length must be at least 1")]
    EmptyBlock,

    #[error("workload too large: {0}")]
    Infeasible(String),

    #[error("no root of the yield in (1/n, 1] for eta0 = {0}")]
    RootNotFound(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
