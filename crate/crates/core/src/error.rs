use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain size must be at least 1")]
    EmptyDomain,
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index {index} outside [0, {domain_size})")]
    IndexOutOfRange { index: usize, domain_size: usize },
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("zero signal has no Fourier ratio")]
    ZeroSignal,
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("dissociated subset would exceed the enumeration guard of {limit} elements; use a larger eta")]
    GuardExceeded { limit: usize },
    #[error("sample mask is empty")]
    EmptyMask,
    #[error("quantized coefficient does not fit in 63 bits at {m_bits} fractional bits")]
    QuantizationOverflow { m_bits: u32 },
    #[error("malformed encoding: {0}")]
    Decode(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
