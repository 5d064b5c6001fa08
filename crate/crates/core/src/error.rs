use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the library. Numerical aborts carry enough location
/// information to reproduce the failing node.
#[derive(Debug, Error, Clone, PartialEq, Serialize, Deserialize)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("null condition violated: surviving monomial {monomial}")]
    NullConditionViolated { monomial: String },

    #[error("null form is not radial-compatible: angle-dependent monomial {monomial}")]
    NotRadialCompatible { monomial: String },

    #[error("hyperbolicity loss at tau = {tau}, node {node} (sigma = {sigma}, rho = {rho}): A = {coefficient}")]
    HyperbolicityLoss {
        tau: f64,
        node: usize,
        sigma: f64,
        rho: f64,
        coefficient: f64,
    },

    #[error("non-finite value at tau = {tau}, node {node}")]
    NonFinite { tau: f64, node: usize },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("not in asymptotic regime: {0}")]
    NotAsymptotic(String),

    #[error("quadrature did not converge: estimate {estimate:e}, achieved relative change {achieved:e}")]
    Quadrature { estimate: f64, achieved: f64 },

    #[error("missing series: {0}")]
    MissingSeries(String),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for aborts raised while integrating (exit code 2 in the CLI).
    pub fn is_numerical_abort(&self) -> bool {
        matches!(self, Error::HyperbolicityLoss { .. } | Error::NonFinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
