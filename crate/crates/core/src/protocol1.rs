//! Encoder and decoder that carry each logical bit on an unentangled qubit
//! pair.
//!
//! Alice prepares `|mm>` and applies a Hadamard to one randomly chosen
//! qubit, giving `|+0>`/`|0+>` for 0 and `|-1>`/`|1->` for 1. Bob measures
//! both qubits in the same randomly chosen basis. Exactly one qubit then
//! saw an even number of Hadamards and reads the true bit; the other reads
//! noise. Agreeing outcomes decode on their own, disagreeing ones need
//! Alice's choice of Hadamard qubit.

use serde::{Deserialize, Serialize};

use crate::qsim::{Qubit, TwoQubitState};
use crate::rng::RandomSource;

/// Bob's measurement basis for both qubits of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Computational,
    /// Hadamard applied to both qubits before measuring.
    Hadamard,
}

impl Basis {
    pub fn random(rng: &mut RandomSource) -> Basis {
        if rng.bit() {
            Basis::Hadamard
        } else {
            Basis::Computational
        }
    }
}

/// Alice's per-pair record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub bit: bool,
    pub hadamard_on: Qubit,
}

impl Encoding {
    pub fn random(bit: bool, rng: &mut RandomSource) -> Self {
        Self { bit, hadamard_on: Qubit::random(rng) }
    }

    pub fn state(&self) -> TwoQubitState {
        encode_bit(self.bit, self.hadamard_on)
    }
}

/// Bob's (or an impostor's) per-pair record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub basis: Basis,
    pub o1: bool,
    pub o2: bool,
}

impl Measurement {
    pub fn agrees(&self) -> bool {
        self.o1 == self.o2
    }

    pub fn outcome(&self, qubit: Qubit) -> bool {
        match qubit {
            Qubit::First => self.o1,
            Qubit::Second => self.o2,
        }
    }
}

pub fn encode_bit(bit: bool, hadamard_on: Qubit) -> TwoQubitState {
    TwoQubitState::prepare(bit, bit).hadamard(hadamard_on)
}

/// The state right before Bob's computational-basis readout.
pub fn bob_rotate(state: &TwoQubitState, basis: Basis) -> TwoQubitState {
    match basis {
        Basis::Computational => *state,
        Basis::Hadamard => state.hadamard_both(),
    }
}

pub fn bob_measure(state: &TwoQubitState, basis: Basis, rng: &mut RandomSource) -> Measurement {
    let (o1, o2) = bob_rotate(state, basis).measure_both(rng);
    Measurement { basis, o1, o2 }
}

/// Result of the sifting step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sifted {
    /// `(pair index, bit)` for pairs whose outcomes agree.
    pub self_decoded: Vec<(usize, bool)>,
    /// Pairs that need Alice's disclosure, ascending.
    pub disagree: Vec<usize>,
}

pub fn sift(records: &[Measurement]) -> Sifted {
    let mut out = Sifted::default();
    for (i, rec) in records.iter().enumerate() {
        if rec.agrees() {
            out.self_decoded.push((i, rec.o1));
        } else {
            out.disagree.push(i);
        }
    }
    out
}

/// Reads the qubit that saw no Hadamard on either side (computational
/// basis) or a Hadamard on both sides (Hadamard basis).
pub fn decode_disclosed(rec: &Measurement, hadamard_on: Qubit) -> bool {
    match rec.basis {
        Basis::Computational => rec.outcome(hadamard_on.other()),
        Basis::Hadamard => rec.outcome(hadamard_on),
    }
}

/// Decodes a whole block given the sifting result and Alice's disclosed
/// choices for the disagreeing pairs.
pub fn decode_block(records: &[Measurement], disclosures: &[(usize, Qubit)]) -> Vec<bool> {
    let mut decoded: Vec<bool> = records.iter().map(|r| r.o1).collect();
    for &(i, q) in disclosures {
        decoded[i] = decode_disclosed(&records[i], q);
    }
    decoded
}
