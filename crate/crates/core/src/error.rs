use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// A parameter record failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Parameters are valid individually but leave no probability mass in the support.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// A quantity (moment, variance) is infinite for the given parameters.
    #[error("divergent: {0}")]
    Divergent(String),

    /// An iterative procedure exhausted its budget.
    #[error("no convergence in {routine} after {evaluations} evaluations (error estimate {estimate:e})")]
    NonConvergence {
        routine: &'static str,
        evaluations: usize,
        estimate: f64,
    },

    /// Not enough data for the requested estimator.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A data point lies outside the support of the model.
    #[error("data point {index} ({value}) is outside the model support")]
    UnsupportedPoint { index: usize, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
