use thiserror::Error;

/// Errors produced by configuration, analytics and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("channel {channel} is not available for {variant}")]
    InvalidChannel { channel: u8, variant: &'static str },

    #[error("operation requires case (b), got {0}")]
    InvalidVariant(&'static str),

    #[error("numerical failure at t'={t_prime:e} (cell {cell}): {reason}")]
    NumericalFailure {
        t_prime: f64,
        cell: usize,
        reason: String,
    },

    #[error("measurement failed: {0}")]
    Measurement(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
