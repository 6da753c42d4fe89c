use thiserror::Error;

/// Errors raised by the numerical routines and the campaign harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precision exhausted at {max_prec_bits} bits (last relative change {last_rel_change:.3e})")]
    PrecisionExhausted {
        max_prec_bits: u32,
        last_rel_change: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Arg(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("path construction failed: {0}")]
    PathFailure(String),

    #[error("assertion failed: {}", .0.join("; "))]
    AssertionFailure(Vec<String>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Arg(msg.into()))
}
