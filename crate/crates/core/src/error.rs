use thiserror::Error;

/// Errors raised while building, solving or verifying a problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coefficient bounds are not available and estimation is disabled")]
    MissingBounds,

    #[error("coefficient `{name}` evaluated to {value} at T = {temperature}")]
    CoefficientEvaluation {
        name: &'static str,
        temperature: f64,
        value: f64,
    },

    #[error("non-finite {quantity} at node {node} (xi = {xi})")]
    NonFinite {
        quantity: &'static str,
        node: usize,
        xi: f64,
    },

    #[error("exponent {exponent:.3} of kernel {kernel} exceeds the overflow guard at node {node} (xi = {xi})")]
    KernelOverflow {
        kernel: &'static str,
        node: usize,
        xi: f64,
        exponent: f64,
    },

    #[error("contraction function undefined: {0}")]
    ContractionUndefined(&'static str),

    #[error("inner fixed-point iteration did not converge at lambda = {lambda} after {iterations} iterations (residual {residual:e})")]
    InnerNonConvergence {
        lambda: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("V(lambda) - lambda has no sign change on [{lo}, {hi}] (g = {g_lo:e} .. {g_hi:e}); existence hypotheses are likely violated")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("no root of {what} found on (0, {upper}]")]
    NoRoot { what: &'static str, upper: f64 },

    #[error("front-fixed scheme became unstable at step {step} (t = {time}): max |T - T_m| = {max_dev:e}")]
    Instability { step: usize, time: f64, max_dev: f64 },

    #[error("unknown boundary condition `{0}`")]
    UnknownBoundary(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}
