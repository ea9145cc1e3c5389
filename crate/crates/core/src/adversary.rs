//! Eavesdropper models.
//!
//! Evan sits on the quantum channel between Alice and Bob. Each pair is
//! intercepted independently with probability `epsilon`. What he does with
//! an intercepted pair depends on the [`Strategy`]; after the block's public
//! discussion he turns his observations into per-bit [`Estimate`]s.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::protocol1::{self, Basis};
use crate::protocol2;
use crate::qsim::{Qubit, Sign, TwoQubitState};
use crate::rng::RandomSource;
use crate::Protocol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    None,
    /// Measure like Bob, then re-prepare a protocol-I codeword.
    InterceptResendP1,
    /// Keep an undisturbed copy when the pulse carries one (probability
    /// `p_dup`), wait for the public discussion, then measure.
    PhotonNumberSplitP1 {
        p_dup: f64,
    },
    /// Run Bob's circuit with a random CZ choice, forward a random codeword.
    InterceptResendP2,
    /// Measure only the first qubit in the `{|+>, |->}` basis.
    FirstQubitP2,
}

impl Strategy {
    /// The protocol this strategy targets, if any.
    pub fn protocol(&self) -> Option<Protocol> {
        match self {
            Strategy::None => None,
            Strategy::InterceptResendP1 | Strategy::PhotonNumberSplitP1 { .. } => Some(Protocol::One),
            Strategy::InterceptResendP2 | Strategy::FirstQubitP2 => Some(Protocol::Two),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attack {
    pub strategy: Strategy,
    /// Per-pair interception probability.
    pub epsilon: f64,
}

impl Default for Attack {
    fn default() -> Self {
        Self::none()
    }
}

impl Attack {
    pub fn new(strategy: Strategy, epsilon: f64) -> Result<Self> {
        let attack = Self { strategy, epsilon };
        attack.validate()?;
        Ok(attack)
    }

    pub fn none() -> Self {
        Self { strategy: Strategy::None, epsilon: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("epsilon", self.epsilon)?;
        if let Strategy::PhotonNumberSplitP1 { p_dup } = self.strategy {
            check_probability("p_dup", p_dup)?;
        }
        Ok(())
    }

    pub fn check_protocol(&self, protocol: Protocol) -> Result<()> {
        match self.strategy.protocol() {
            Some(p) if p != protocol => Err(Error::InvalidConfig(format!(
                "attack {:?} targets protocol {}, session runs protocol {}",
                self.strategy,
                p.number(),
                protocol.number()
            ))),
            _ => Ok(()),
        }
    }
}

/// What Evan kept from one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    /// The pair went by untouched.
    Untouched,
    /// Tapped, but the pulse had no spare photon pair.
    NoCopy,
    Stored(TwoQubitState),
    MeasuredP1(protocol1::Measurement),
    MeasuredP2(protocol2::Measurement),
    FirstQubit(Sign),
}

impl Observation {
    pub fn intercepted(&self) -> bool {
        !matches!(self, Observation::Untouched)
    }
}

/// Evan's final belief about one logical bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimate {
    Unknown,
    /// Implied with certainty by his observations and the public record.
    Certain(bool),
    /// His decoder's output when the observation carries no information.
    Guess(bool),
}

impl Estimate {
    pub fn bit(&self) -> Option<bool> {
        match *self {
            Estimate::Unknown => None,
            Estimate::Certain(b) | Estimate::Guess(b) => Some(b),
        }
    }

    pub fn is_certain(&self) -> bool {
        matches!(self, Estimate::Certain(_))
    }
}

/// Everything said on the classical channel that Evan can use for one
/// block of pairs.
#[derive(Debug, Clone, Copy)]
pub enum Disclosure<'a> {
    /// Protocol I: Alice's Hadamard choice for each pair Bob could not
    /// decode alone.
    HadamardChoices(&'a [(usize, Qubit)]),
    /// Protocol II: every code-family bit of the block.
    FamilyBits(&'a [bool]),
}

#[derive(Debug, Clone)]
pub struct Eavesdropper {
    attack: Attack,
    rng: RandomSource,
    block: Vec<Observation>,
}

impl Eavesdropper {
    pub fn new(attack: Attack, seed: u64) -> Self {
        Self { attack, rng: RandomSource::new(seed), block: Vec::new() }
    }

    pub fn attack(&self) -> &Attack {
        &self.attack
    }

    /// Handles one pair in flight and returns what continues toward Bob.
    pub fn intercept(&mut self, state: TwoQubitState) -> TwoQubitState {
        let tapped = !matches!(self.attack.strategy, Strategy::None) && self.rng.bernoulli(self.attack.epsilon);
        if !tapped {
            self.block.push(Observation::Untouched);
            return state;
        }
        let (observation, forwarded) = match self.attack.strategy {
            Strategy::None => unreachable!(),
            Strategy::InterceptResendP1 => {
                let (rec, fwd) = intercept_resend_p1(&state, &mut self.rng);
                (Observation::MeasuredP1(rec), fwd)
            }
            Strategy::PhotonNumberSplitP1 { p_dup } => {
                if self.rng.bernoulli(p_dup) {
                    (Observation::Stored(state), state)
                } else {
                    (Observation::NoCopy, state)
                }
            }
            Strategy::InterceptResendP2 => {
                let (rec, fwd) = intercept_resend_p2(&state, &mut self.rng);
                (Observation::MeasuredP2(rec), fwd)
            }
            Strategy::FirstQubitP2 => {
                let (sign, collapsed) = state.measure_first_diagonal(&mut self.rng);
                (Observation::FirstQubit(sign), collapsed)
            }
        };
        self.block.push(observation);
        forwarded
    }

    /// Ends the current block, handing back its observations.
    pub fn take_block(&mut self) -> Vec<Observation> {
        std::mem::take(&mut self.block)
    }

    /// Turns a block's observations into estimates once the public
    /// discussion for that block is over.
    pub fn finalize(&mut self, observations: &[Observation], disclosure: Disclosure<'_>) -> Vec<Estimate> {
        match disclosure {
            Disclosure::HadamardChoices(choices) => {
                let mut revealed: Vec<Option<Qubit>> = vec![None; observations.len()];
                for &(i, q) in choices {
                    if let Some(slot) = revealed.get_mut(i) {
                        *slot = Some(q);
                    }
                }
                observations.iter().zip(revealed).map(|(obs, r)| self.finalize_p1(obs, r)).collect()
            }
            Disclosure::FamilyBits(a_bits) => {
                observations.iter().zip(a_bits).map(|(obs, &a)| finalize_p2(obs, a)).collect()
            }
        }
    }

    fn finalize_p1(&mut self, obs: &Observation, revealed: Option<Qubit>) -> Estimate {
        match obs {
            Observation::MeasuredP1(rec) => {
                if rec.agrees() {
                    Estimate::Certain(rec.o1)
                } else if let Some(q) = revealed {
                    Estimate::Certain(protocol1::decode_disclosed(rec, q))
                } else {
                    Estimate::Unknown
                }
            }
            Observation::Stored(copy) => match revealed {
                Some(q) => {
                    let rec = protocol1::bob_measure(copy, Basis::Computational, &mut self.rng);
                    Estimate::Certain(rec.outcome(q.other()))
                }
                None => {
                    let basis = Basis::random(&mut self.rng);
                    let rec = protocol1::bob_measure(copy, basis, &mut self.rng);
                    if rec.agrees() {
                        Estimate::Certain(rec.o1)
                    } else {
                        Estimate::Unknown
                    }
                }
            },
            _ => Estimate::Unknown,
        }
    }
}

fn finalize_p2(obs: &Observation, a: bool) -> Estimate {
    match obs {
        Observation::MeasuredP2(rec) => Estimate::Certain(protocol2::decode(rec, a)),
        Observation::FirstQubit(sign) => {
            let bit = *sign == Sign::Minus;
            if a {
                Estimate::Certain(bit)
            } else {
                Estimate::Guess(bit)
            }
        }
        _ => Estimate::Unknown,
    }
}

/// Evan measures like Bob and re-encodes a codeword as Alice would: he
/// picks a Hadamard qubit at random and the bit that his record decodes to
/// under that choice. Agreeing outcomes decode to the same bit either way.
pub fn intercept_resend_p1(state: &TwoQubitState, rng: &mut RandomSource) -> (protocol1::Measurement, TwoQubitState) {
    let basis = Basis::random(rng);
    let rec = protocol1::bob_measure(state, basis, rng);
    let hadamard_on = Qubit::random(rng);
    let bit = protocol1::decode_disclosed(&rec, hadamard_on);
    (rec, protocol1::encode_bit(bit, hadamard_on))
}

/// Evan runs Bob's circuit, then has to send something before the family
/// bits are public, so he sends a uniformly random codeword.
pub fn intercept_resend_p2(state: &TwoQubitState, rng: &mut RandomSource) -> (protocol2::Measurement, TwoQubitState) {
    let b = rng.bit();
    let rec = protocol2::bob_measure(state, b, rng);
    let bit = rng.bit();
    let a = rng.bit();
    (rec, protocol2::encode_bit(bit, a))
}
