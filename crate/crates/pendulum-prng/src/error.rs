use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The integrator produced a NaN or infinite state; the caller's
    /// configuration is unusable.
    #[error("non-finite pendulum state after integration step")]
    NonFiniteState,

    /// A parameter violated its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A statistical test was handed fewer bits than its minimum.
    #[error("{test}: sequence too short (need at least {needed} bits, got {got})")]
    InsufficientLength {
        test: &'static str,
        needed: usize,
        got: usize,
    },

    /// A bitstream file contained a byte outside the format's alphabet.
    #[error("invalid bitstream byte {byte:#04x} ({}) at offset {offset}", char::from(*byte).escape_default())]
    Format { offset: usize, byte: u8 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
