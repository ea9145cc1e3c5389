use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index must be 1 or 2, got {0}")]
    InvalidQubit(u8),
    #[error("state has zero norm")]
    ZeroState,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("key length must be at least 1")]
    EmptyKey,
    #[error("at least one redundancy bit is required")]
    NoRedundancy,
    #[error("redundancy position {position} out of range for length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("redundancy positions must be strictly ascending (at {0})")]
    PositionsNotAscending(usize),
    #[error("packet of {0} bits is too short to hold a message and a 32-bit hash")]
    PacketTooShort(usize),
    #[error("hash mismatch: received {received:#010x}, computed {computed:#010x}")]
    HashMismatch { received: u32, computed: u32 },
    #[error("{name} must lie in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
