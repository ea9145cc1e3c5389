//! Encoder and decoder built on conditionally entangled pairs.
//!
//! Alice's random bit `a` selects between two code families:
//!
//! | a | bit 1                 | bit 0                 |
//! |---|-----------------------|-----------------------|
//! | 0 | (\|-0> - \|+1>)/sqrt2 | (\|+0> - \|-1>)/sqrt2 |
//! | 1 | \|-->                 | \|+->                 |
//!
//! Bob optionally applies CZ (his bit `b`), then a Hadamard on the first
//! qubit, then measures both. When `a == b` the outcome parity carries the
//! bit; otherwise the first qubit does. Alice reveals every `a` once the
//! packet is complete, and every pair decodes deterministically.

use serde::{Deserialize, Serialize};

use crate::qsim::{Qubit, TwoQubitState};
use crate::rng::RandomSource;

/// Alice's per-pair record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub bit: bool,
    /// `false` selects the entangled family, `true` the product family.
    pub a: bool,
}

impl Encoding {
    pub fn random(bit: bool, rng: &mut RandomSource) -> Self {
        Self { bit, a: rng.bit() }
    }

    pub fn state(&self) -> TwoQubitState {
        encode_bit(self.bit, self.a)
    }

    pub fn is_entangled(&self) -> bool {
        !self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    /// Whether the CZ was enabled before the Hadamard.
    pub b: bool,
    pub o1: bool,
    pub o2: bool,
}

pub fn encode_bit(bit: bool, a: bool) -> TwoQubitState {
    let amps = match (bit, a) {
        (true, false) => [1.0, -1.0, -1.0, -1.0],
        (false, false) => [1.0, -1.0, 1.0, 1.0],
        (true, true) => [1.0, -1.0, -1.0, 1.0],
        (false, true) => [1.0, -1.0, 1.0, -1.0],
    };
    TwoQubitState::from_real(amps).expect("code states are nonzero")
}

/// Bob's circuit up to (not including) the readout.
pub fn bob_rotate(state: &TwoQubitState, b: bool) -> TwoQubitState {
    state.cz_if(b).hadamard(Qubit::First)
}

pub fn bob_measure(state: &TwoQubitState, b: bool, rng: &mut RandomSource) -> Measurement {
    let (o1, o2) = bob_rotate(state, b).measure_both(rng);
    Measurement { b, o1, o2 }
}

pub fn decode(rec: &Measurement, a: bool) -> bool {
    if a == rec.b {
        rec.o1 ^ rec.o2
    } else {
        rec.o1
    }
}

pub fn decode_block(records: &[Measurement], a_bits: &[bool]) -> Vec<bool> {
    records.iter().zip(a_bits).map(|(rec, &a)| decode(rec, a)).collect()
}
