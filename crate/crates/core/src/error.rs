use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VipError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is not feasible: {0}")]
    Infeasible(String),

    #[error("operator evaluated outside its domain: {0}")]
    OperatorDomain(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("line search failed after {max_backtracks} backtracks")]
    LineSearchFailed { max_backtracks: u32 },

    #[error("vanishing operator at z")]
    VanishingOperator,

    #[error("Frank-Wolfe step with zero direction but negative gap {gap:e}")]
    FwInconsistent { gap: f64 },

    #[error("Frank-Wolfe reached the iteration cap ({iterations}) with gap {gap:e}")]
    FwMaxIter { iterations: u64, gap: f64 },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, VipError>;
