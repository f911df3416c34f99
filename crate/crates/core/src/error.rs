use thiserror::Error;

/// Errors produced by the pricing library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error(
        "quadrature did not converge (achieved error estimate {achieved:e}, target {target:e})"
    )]
    Quadrature { achieved: f64, target: f64 },

    /// The multivariate normal integrator could not reach the requested tolerance.
    #[error("multivariate normal CDF did not reach tolerance {target:e} (achieved {achieved:e})")]
    MvnTolerance { achieved: f64, target: f64 },

    #[error("correlation matrix is not positive semi-definite")]
    NotPositiveSemiDefinite,

    #[error("binary order {order} exceeds the dimension cap {cap}; use the recursive pricer")]
    DimensionCap { order: usize, cap: usize },

    /// The barrier equation at coupon date `date_index` has more than one root.
    #[error("barrier equation at coupon date {date_index} (T = {date}) has {} roots near {roots:?}", roots.len())]
    MultipleRoots {
        date_index: usize,
        date: f64,
        roots: Vec<f64>,
    },

    #[error("barrier equation at coupon date {date_index} has no root in [0, {bracket}]")]
    NoRoot { date_index: usize, bracket: f64 },

    #[error("payoff is unbounded; {0}")]
    Unbounded(String),

    #[error("payoff limit does not exist: {0}")]
    MissingLimit(String),

    #[error("{0} is not a registered breakpoint")]
    UnknownBreakpoint(f64),

    #[error("payoff segment does not provide a {0} derivative")]
    MissingDerivative(&'static str),

    #[error("finite difference solution became unstable at t = {t}")]
    Unstable { t: f64 },

    #[error("invalid input: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
