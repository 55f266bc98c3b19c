use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid loss range [{a}, {b}]: need finite a < b")]
    InvalidRange { a: f64, b: f64 },
    #[error("distribution error: {0}")]
    Distribution(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("relative entropy undefined: P is not absolutely continuous w.r.t. Q")]
    NotAbsolutelyContinuous,
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("joint has {states} states, limit is {limit}")]
    StateSpaceOverflow { states: u128, limit: u128 },
    #[error("trajectory diverged at iteration {iteration}")]
    Diverged { iteration: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
