use thiserror::Error;

use crate::linprog::LpStatus;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state budget {lambda} is below the cheapest state cost {min_cost}")]
    InfeasibleBudget { lambda: f64, min_cost: f64 },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("linear program ({context}) ended with status {status:?}")]
    Lp {
        context: &'static str,
        status: LpStatus,
    },

    #[error("simplex lost accuracy: {0}")]
    Numerical(String),

    #[error("simplex iteration limit reached after {0} pivots")]
    IterationLimit(usize),

    #[error("frank-wolfe stopped after {iterations} iterations with duality gap {gap:e}")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("marginal constraint matrix is rank deficient")]
    RankDeficient,

    #[error("jammer could not meet the state budget in {attempts} draws")]
    BudgetExhausted { attempts: usize },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("channel file: {0}")]
    ChannelFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
