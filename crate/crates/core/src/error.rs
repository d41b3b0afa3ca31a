use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma function has a pole at {0}")]
    Pole(f64),

    #[error("stirling table covers k, j <= {max}; requested ({k}, {j})")]
    OutOfTable { k: usize, j: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative of order {order} unavailable (max order {max_order})")]
    DerivativeUnavailable { order: usize, max_order: usize },

    #[error("quadrature needs {requested} nodes, limit is {limit}")]
    ResourceGuard { requested: usize, limit: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid must be strictly increasing (violated at index {0})")]
    GridOrder(usize),

    #[error("replaced system is singular at t = {0} (requires t > a)")]
    SingularDenominator(f64),

    #[error("non-finite state at t = {0}")]
    NonFinite(f64),

    #[error("bound violated at t = {t}: |error| = {error:e} > bound = {bound:e}")]
    BoundViolation { t: f64, error: f64, bound: f64 },

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
