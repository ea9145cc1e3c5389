//! Deterministic secure quantum communication over qubit pairs.
//!
//! Two encoders are provided: [`protocol1`] carries each bit on an
//! unentangled pair, [`protocol2`] on a pair that is entangled or not
//! depending on a secret random bit. Both share the classical pipeline in
//! [`classical`] (hash, one-time pad, hidden check bits). [`adversary`]
//! models an eavesdropper on the quantum channel and [`harness`] runs whole
//! sessions and intervention-rate sweeps.

pub mod adversary;
pub mod classical;
pub mod error;
pub mod harness;
pub mod protocol1;
pub mod protocol2;
pub mod qsim;
pub mod rng;
pub mod selftest;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use qsim::{Qubit, TwoQubitState};
pub use rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    /// Unentangled pairs.
    One,
    /// Conditionally entangled pairs.
    Two,
}

impl Protocol {
    pub fn number(self) -> u8 {
        match self {
            Protocol::One => 1,
            Protocol::Two => 2,
        }
    }
}

impl TryFrom<u8> for Protocol {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Protocol::One),
            2 => Ok(Protocol::Two),
            other => Err(Error::InvalidConfig(format!("protocol must be 1 or 2, got {other}"))),
        }
    }
}
