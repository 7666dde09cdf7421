use thiserror::Error;

/// Errors raised by the state, channel, planning and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unphysical covariance matrix: det = {det} (positive definite: {positive_definite})")]
    UnphysicalCovariance { det: f64, positive_definite: bool },

    #[error("invalid mode parameters: {0}")]
    InvalidParams(String),

    #[error("invalid bath: {0}")]
    InvalidBath(String),

    #[error("invalid tolerance: epsilon = {0} must lie in (0, 1)")]
    InvalidTolerance(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("phase rate is singular: {0}")]
    DegeneratePhase(String),

    #[error("trajectory is degenerate: {0}")]
    DegenerateTrajectory(String),

    #[error("argument outside the domain swept by the trajectory: {0}")]
    OutOfRange(String),

    #[error("root solve did not converge: {0}")]
    NotConverged(String),

    /// The fixed point is pure; the caller should use the pure-target formulas.
    #[error("fixed point is pure (mu_fp = {mu_fp}); use the pure fixed-point routines")]
    PureFixedPoint { mu_fp: f64 },

    #[error("wrong direction: {0}")]
    WrongDirection(String),

    #[error("control budget too small: {0}")]
    BudgetTooSmall(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("step limit exceeded: {needed} steps needed, {max_steps} allowed")]
    StepLimitExceeded { needed: u64, max_steps: u64 },

    #[error("protocol violates its budget: {0}")]
    BudgetViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
