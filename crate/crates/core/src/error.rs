use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("power {requested} is not attainable; attainable range is [{min}, 1)")]
    UnattainablePower { requested: f64, min: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{metric} is undefined: {reason}")]
    UndefinedMetric {
        metric: &'static str,
        reason: String,
    },

    #[error("integrand is not finite at cell psp={psp}, pwr={pwr}")]
    NonFinite { psp: f64, pwr: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
