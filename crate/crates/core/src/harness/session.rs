//! One packet end to end: classical preprocessing, quantum transmission of
//! the cipher packet with Evan in the path, sifting and the redundancy
//! check, then (unless aborted) the key, decryption and hash verification.

use serde::{Deserialize, Serialize};

use crate::adversary::{Attack, Disclosure, Eavesdropper, Estimate, Observation};
use crate::classical::{self, AbortPolicy, CheckOutcome, PacketBundle, HASH_BITS};
use crate::error::{check_probability, Error, Result};
use crate::harness::channel::apply_channel_noise;
use crate::harness::metrics::{certain_fraction, compute_iae, compute_qber};
use crate::harness::transcript::{ClassicalMessage, Party, Phase, Transcript};
use crate::qsim::TwoQubitState;
use crate::rng::{derive_seed, RandomSource};
use crate::{protocol1, protocol2, Protocol};

/// Default packet size in message bits.
pub const DEFAULT_MESSAGE_BITS: usize = 10_000;

const MESSAGE_STREAM: u64 = 0x6d65_7373;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub alice: u64,
    pub bob: u64,
    pub evan: u64,
    pub channel: u64,
}

impl Seeds {
    /// Four independent streams derived from one seed.
    pub fn from_base(seed: u64) -> Self {
        Self {
            alice: derive_seed(seed, 1),
            bob: derive_seed(seed, 2),
            evan: derive_seed(seed, 3),
            channel: derive_seed(seed, 4),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub protocol: Protocol,
    pub message_bits: usize,
    /// Number of check bits; `None` uses [`classical::default_redundancy`].
    pub redundancy: Option<usize>,
    pub attack: Attack,
    /// Per-qubit depolarizing probability on the quantum channel.
    pub noise: f64,
    pub abort_policy: AbortPolicy,
    /// When `false` the redundancy check is evaluated and reported but never
    /// stops the session; used to measure error rates at any intervention
    /// rate.
    pub enforce_abort: bool,
    pub seeds: Seeds,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            protocol: Protocol::One,
            message_bits: DEFAULT_MESSAGE_BITS,
            redundancy: None,
            attack: Attack::none(),
            noise: 0.0,
            abort_policy: AbortPolicy::zero_tolerance(),
            enforce_abort: true,
            seeds: Seeds::from_base(0),
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.message_bits == 0 {
            return Err(Error::InvalidConfig("message_bits must be at least 1".into()));
        }
        if self.redundancy == Some(0) {
            return Err(Error::NoRedundancy);
        }
        check_probability("noise", self.noise)?;
        self.attack.validate()?;
        self.attack.check_protocol(self.protocol)?;
        // re-validate through the constructor's rules
        AbortPolicy::new(self.abort_policy.expected_error_rate, self.abort_policy.sigma_margin)?;
        Ok(())
    }

    pub fn redundancy_bits(&self) -> usize {
        self.redundancy.unwrap_or_else(|| classical::default_redundancy(self.message_bits + HASH_BITS))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Delivery {
    Delivered { message: Vec<bool> },
    HashMismatch,
    Aborted { mismatch_fraction: f64 },
}

impl Delivery {
    pub fn is_delivered(&self) -> bool {
        matches!(self, Delivery::Delivered { .. })
    }
}

/// Everything one quantum block produced.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutcome {
    pub sent: Vec<bool>,
    pub decoded: Vec<bool>,
    pub observations: Vec<Observation>,
    pub estimates: Vec<Estimate>,
}

impl BlockOutcome {
    pub fn qber(&self) -> f64 {
        compute_qber(&self.sent, &self.decoded).expect("block lengths match")
    }

    pub fn evan_known_fraction(&self) -> f64 {
        compute_iae(&self.sent, &self.estimates).expect("block lengths match")
    }

    pub fn intercepted(&self) -> usize {
        self.observations.iter().filter(|o| o.intercepted()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionResult {
    pub delivery: Delivery,
    /// Bob's error rate over the transmitted packet T.
    pub qber: f64,
    /// Fraction of T Evan decodes correctly.
    pub evan_known_fraction: f64,
    /// Fraction of T Evan holds with certainty.
    pub evan_certain_fraction: f64,
    pub check: CheckOutcome,
    pub message_block: BlockOutcome,
    /// Present only when the key was transmitted.
    pub key_block: Option<BlockOutcome>,
    pub transcript: Transcript,
}

impl SessionResult {
    pub fn aborted(&self) -> bool {
        matches!(self.delivery, Delivery::Aborted { .. })
    }

    /// Whether the redundancy check flagged the session, enforced or not.
    pub fn detected(&self) -> bool {
        self.check.is_abort()
    }
}

/// Runs a session on a random message drawn from a dedicated stream.
pub fn run_session(cfg: &SessionConfig) -> Result<SessionResult> {
    cfg.validate()?;
    let message = RandomSource::new(derive_seed(cfg.seeds.alice, MESSAGE_STREAM)).bits(cfg.message_bits);
    run_session_with_message(cfg, message)
}

/// Runs a session on the given message packet (its length overrides
/// `cfg.message_bits`).
pub fn run_session_with_message(cfg: &SessionConfig, message: Vec<bool>) -> Result<SessionResult> {
    let cfg = SessionConfig { message_bits: message.len(), ..cfg.clone() };
    cfg.validate()?;

    let mut alice = RandomSource::new(cfg.seeds.alice);
    let mut bob = RandomSource::new(cfg.seeds.bob);
    let mut channel = RandomSource::new(cfg.seeds.channel);
    let mut evan = Eavesdropper::new(cfg.attack, cfg.seeds.evan);
    let mut transcript = Transcript::new();

    let bundle = PacketBundle::seal(message, cfg.redundancy_bits(), &mut alice)?;

    let mut link = Link {
        protocol: cfg.protocol,
        noise: cfg.noise,
        alice: &mut alice,
        bob: &mut bob,
        channel: &mut channel,
        evan: &mut evan,
        transcript: &mut transcript,
    };
    let message_block = link.transmit(&bundle.transmitted, Phase::Message)?;

    let redundancy = &bundle.redundancy;
    link.transcript.send(
        Party::Alice,
        ClassicalMessage::RedundancyReveal {
            positions: redundancy.positions.clone(),
            values: redundancy.values.clone(),
        },
    );
    let bob_values = redundancy.read_from(&message_block.decoded)?;
    link.transcript.send(Party::Bob, ClassicalMessage::RedundancyReport { values: bob_values.clone() });
    let check = classical::check_redundancy(&redundancy.values, &bob_values, &cfg.abort_policy)?;

    let qber = message_block.qber();
    let evan_known_fraction = message_block.evan_known_fraction();
    let evan_certain_fraction = certain_fraction(&message_block.sent, &message_block.estimates)?;

    if let (CheckOutcome::Abort { mismatch_fraction }, true) = (check, cfg.enforce_abort) {
        link.transcript.send(Party::Alice, ClassicalMessage::Abort { mismatch_fraction });
        return Ok(SessionResult {
            delivery: Delivery::Aborted { mismatch_fraction },
            qber,
            evan_known_fraction,
            evan_certain_fraction,
            check,
            message_block,
            key_block: None,
            transcript,
        });
    }

    link.transcript.send(Party::Alice, ClassicalMessage::KeyPhaseStart);
    let key_block = link.transmit(&bundle.key, Phase::Key)?;

    let delivery = match PacketBundle::open(&message_block.decoded, &redundancy.positions, &key_block.decoded) {
        Ok(message) => Delivery::Delivered { message },
        Err(Error::HashMismatch { .. }) => Delivery::HashMismatch,
        Err(other) => return Err(other),
    };
    link.transcript.send(Party::Bob, ClassicalMessage::Done { verified: delivery.is_delivered() });

    Ok(SessionResult {
        delivery,
        qber,
        evan_known_fraction,
        evan_certain_fraction,
        check,
        message_block,
        key_block: Some(key_block),
        transcript,
    })
}

struct Link<'a> {
    protocol: Protocol,
    noise: f64,
    alice: &'a mut RandomSource,
    bob: &'a mut RandomSource,
    channel: &'a mut RandomSource,
    evan: &'a mut Eavesdropper,
    transcript: &'a mut Transcript,
}

impl Link<'_> {
    /// Sends one state from Alice through Evan and the noisy channel.
    fn carry(&mut self, state: TwoQubitState) -> Result<TwoQubitState> {
        let tampered = self.evan.intercept(state);
        apply_channel_noise(&tampered, self.noise, self.channel)
    }

    /// Quantum transmission of a block plus its public discussion.
    fn transmit(&mut self, bits: &[bool], phase: Phase) -> Result<BlockOutcome> {
        match self.protocol {
            Protocol::One => self.transmit_p1(bits, phase),
            Protocol::Two => self.transmit_p2(bits, phase),
        }
    }

    fn transmit_p1(&mut self, bits: &[bool], phase: Phase) -> Result<BlockOutcome> {
        let mut encodings = Vec::with_capacity(bits.len());
        let mut records = Vec::with_capacity(bits.len());
        for &bit in bits {
            let enc = protocol1::Encoding::random(bit, self.alice);
            let received = self.carry(enc.state())?;
            let basis = protocol1::Basis::random(self.bob);
            records.push(protocol1::bob_measure(&received, basis, self.bob));
            encodings.push(enc);
        }
        self.transcript.send(Party::Alice, ClassicalMessage::PacketSent { phase, pairs: bits.len() });

        let sifted = protocol1::sift(&records);
        self.transcript.send(
            Party::Bob,
            ClassicalMessage::AgreeIndices { phase, indices: sifted.self_decoded.iter().map(|&(i, _)| i).collect() },
        );
        let choices: Vec<_> = sifted.disagree.iter().map(|&i| (i, encodings[i].hadamard_on)).collect();
        self.transcript.send(
            Party::Alice,
            ClassicalMessage::BasisDisclosure {
                phase,
                choices: choices.iter().map(|&(i, q)| (i, q.index())).collect(),
            },
        );
        let decoded = protocol1::decode_block(&records, &choices);

        let observations = self.evan.take_block();
        let estimates = self.evan.finalize(&observations, Disclosure::HadamardChoices(&choices));
        Ok(BlockOutcome { sent: bits.to_vec(), decoded, observations, estimates })
    }

    fn transmit_p2(&mut self, bits: &[bool], phase: Phase) -> Result<BlockOutcome> {
        let mut a_bits = Vec::with_capacity(bits.len());
        let mut records = Vec::with_capacity(bits.len());
        for &bit in bits {
            let enc = protocol2::Encoding::random(bit, self.alice);
            let received = self.carry(enc.state())?;
            let b = self.bob.bit();
            records.push(protocol2::bob_measure(&received, b, self.bob));
            a_bits.push(enc.a);
        }
        self.transcript.send(Party::Alice, ClassicalMessage::PacketSent { phase, pairs: bits.len() });
        self.transcript.send(Party::Alice, ClassicalMessage::RngDisclosureP2 { phase, a_bits: a_bits.clone() });
        let decoded = protocol2::decode_block(&records, &a_bits);

        let observations = self.evan.take_block();
        let estimates = self.evan.finalize(&observations, Disclosure::FamilyBits(&a_bits));
        Ok(BlockOutcome { sent: bits.to_vec(), decoded, observations, estimates })
    }
}
