use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank {0} is not supported here (need q >= 2)")]
    RankTooSmall(usize),

    #[error("{what} cap exceeded: requested {requested}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("numeric blow-up near the boundary of the disc (|z| = {radius})")]
    BoundaryBlowUp { radius: f64 },

    #[error("sample {sample}: {source}")]
    Sample {
        sample: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("diagnostic failure: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
