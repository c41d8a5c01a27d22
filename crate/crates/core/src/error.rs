use thiserror::Error;

/// Errors produced by the dwell-time engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain
    /// (non-positive width, negative optical depth, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A position or coordinate fell outside the region where the quantity
    /// is defined.
    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Quadrature or time integration failed to reach its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The requested operation does not support this pulse or medium variant.
    #[error("unsupported variant: {0}")]
    Unsupported(String),

    /// A conditional quantity is undefined because its conditioning event has
    /// zero probability.
    #[error("undefined: {0}")]
    Undefined(String),

    /// The brute-force scattering oracle would exceed its work budget.
    #[error("oracle budget exceeded: {required} cell-steps needed, budget is {budget}")]
    OracleBudget { required: u128, budget: u128 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
