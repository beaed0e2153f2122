use thiserror::Error;

/// Errors produced by the analysis modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// An input object (density matrix, covariance, ...) violates its invariants.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Quadrature or ODE integration did not reach the requested tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The adaptive integrator could not keep the step error below tolerance.
    #[error("integration stalled at ell = {ell}, lambda = {lambda}: {reason}")]
    Integration { ell: f64, lambda: f64, reason: String },

    /// A closed form was evaluated at or beyond its strong-coupling pole.
    #[error("strong coupling: {0}")]
    StrongCoupling(String),

    /// The leading-order flawless-evolution formula has a vanishing denominator.
    #[error("singular exponent 4*delta/z = {ratio}: evaluate the correction integral numerically")]
    SingularExponent { ratio: f64 },

    /// The noise model cannot be realised as a Gaussian process.
    #[error("noise model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(param(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(param(name, format!("must be finite and >= 0, got {value}")))
    }
}
