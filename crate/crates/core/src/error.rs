use thiserror::Error;

/// Failures raised by the numeric and corpus routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {name} = {value} is outside {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("degenerate series: weighted variance is zero")]
    DegenerateSeries,
    #[error("signal too short: need at least {needed} samples, got {got}")]
    SignalTooShort { needed: usize, got: usize },
    #[error("no mass in fit window")]
    NoMassInFitWindow,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<R>(name: &'static str, value: f64, expected: &'static str) -> Result<R> {
    Err(Error::Domain {
        name,
        value,
        expected,
    })
}
