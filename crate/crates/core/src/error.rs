use thiserror::Error;

/// Errors raised by the modem, channel and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spreading factor {0} outside supported range 2..=16")]
    InvalidSpreadingFactor(u32),

    #[error("invalid {field} = {value}: {reason}")]
    InvalidSymbol {
        field: &'static str,
        value: i64,
        reason: &'static str,
    },

    #[error("bit word has {got} bits, expected {expected}")]
    BitLength { expected: usize, got: usize },

    #[error("buffer length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("transform length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("invalid scheme parameters: {0}")]
    InvalidScheme(String),

    #[error("{0} has no non-coherent detector; BER simulation is not supported for it")]
    NoDetector(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),

    #[error("target BER {target:e} is not bracketed by the sweep; extend the Eb/N0 grid")]
    NoBracket { target: f64 },

    #[error("symbol energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
