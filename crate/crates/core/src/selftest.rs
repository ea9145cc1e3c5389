//! Release gate: exhaustive decoder checks, the four full-interception
//! checkpoints and the classical pipeline round trip.

use std::fmt;

use crate::adversary::{Attack, Strategy};
use crate::classical::{default_redundancy, AbortPolicy, PacketBundle, HASH_BITS};
use crate::error::Result;
use crate::harness::sweep::{run_sweep, SweepConfig};
use crate::harness::DEFAULT_MESSAGE_BITS;
use crate::qsim::Qubit;
use crate::rng::{derive_seed, RandomSource};
use crate::{protocol1, protocol2, Protocol};

const BRANCH_EPS: f64 = 1e-12;

/// Outcome of an exhaustive branch enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchTally {
    pub branches: usize,
    pub failures: usize,
}

/// Every `(bit, hadamard qubit, basis)` circuit and every measurement
/// branch with nonzero probability, decoded the way Bob would.
pub fn exhaustive_p1(decode: impl Fn(&protocol1::Measurement, Qubit) -> bool) -> BranchTally {
    let mut tally = BranchTally { branches: 0, failures: 0 };
    for bit in [false, true] {
        for r in [Qubit::First, Qubit::Second] {
            for basis in [protocol1::Basis::Computational, protocol1::Basis::Hadamard] {
                let probs = protocol1::bob_rotate(&protocol1::encode_bit(bit, r), basis).probabilities();
                for (idx, p) in probs.iter().enumerate() {
                    if *p < BRANCH_EPS {
                        continue;
                    }
                    let rec = protocol1::Measurement { basis, o1: idx & 2 != 0, o2: idx & 1 != 0 };
                    let got = if rec.agrees() { rec.o1 } else { decode(&rec, r) };
                    tally.branches += 1;
                    tally.failures += usize::from(got != bit);
                }
            }
        }
    }
    tally
}

/// Every `(bit, a, b)` circuit and every nonzero measurement branch.
pub fn exhaustive_p2(decode: impl Fn(&protocol2::Measurement, bool) -> bool) -> BranchTally {
    let mut tally = BranchTally { branches: 0, failures: 0 };
    for bit in [false, true] {
        for a in [false, true] {
            for b in [false, true] {
                let probs = protocol2::bob_rotate(&protocol2::encode_bit(bit, a), b).probabilities();
                for (idx, p) in probs.iter().enumerate() {
                    if *p < BRANCH_EPS {
                        continue;
                    }
                    let rec = protocol2::Measurement { b, o1: idx & 2 != 0, o2: idx & 1 != 0 };
                    tally.branches += 1;
                    tally.failures += usize::from(decode(&rec, a) != bit);
                }
            }
        }
    }
    tally
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.observed - self.expected).abs() <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selftest seed {}", self.seed)?;
        writeln!(f, "{:<44} {:>10} {:>10} {:>8}  result", "check", "expected", "observed", "tol")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<44} {:>10.6} {:>10.6} {:>8.4}  {}",
                c.name,
                c.expected,
                c.observed,
                c.tolerance,
                if c.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        write!(f, "{}", if self.passed() { "all checks passed" } else { "SELFTEST FAILED" })
    }
}

fn checkpoint(protocol: Protocol, strategy: Strategy, seed: u64) -> Result<(f64, f64)> {
    let cfg = SweepConfig {
        protocol,
        attack: Attack::new(strategy, 1.0)?,
        message_bits: DEFAULT_MESSAGE_BITS,
        redundancy: None,
        noise: 0.0,
        abort_policy: AbortPolicy::zero_tolerance(),
        epsilons: vec![1.0],
        trials: 1,
        seed,
    };
    let row = run_sweep(&cfg)?.rows[0];
    Ok((row.qber, row.iae))
}

/// Runs the gate with the library's own decoders.
pub fn run(seed: u64) -> Result<Report> {
    run_with_decoders(seed, protocol1::decode_disclosed, protocol2::decode)
}

/// Same gate with substitute decoders, so a broken rule can be shown to
/// fail it.
pub fn run_with_decoders(
    seed: u64,
    decode_p1: impl Fn(&protocol1::Measurement, Qubit) -> bool,
    decode_p2: impl Fn(&protocol2::Measurement, bool) -> bool,
) -> Result<Report> {
    let mut checks = Vec::new();
    let mut push = |name: &str, expected: f64, observed: f64, tolerance: f64| {
        checks.push(Check { name: name.to_string(), expected, observed, tolerance })
    };

    let t1 = exhaustive_p1(decode_p1);
    push("protocol 1 exhaustive decode failures", 0.0, t1.failures as f64, 0.0);
    let t2 = exhaustive_p2(decode_p2);
    push("protocol 2 exhaustive decode failures", 0.0, t2.failures as f64, 0.0);

    let (q, i) = checkpoint(Protocol::One, Strategy::InterceptResendP1, derive_seed(seed, 1))?;
    push("P1 intercept-resend eps=1 QBER", 0.25, q, 0.015);
    push("P1 intercept-resend eps=1 I_AE", 0.75, i, 0.015);
    let (q, i) = checkpoint(Protocol::One, Strategy::PhotonNumberSplitP1 { p_dup: 1.0 }, derive_seed(seed, 2))?;
    push("P1 photon-number-splitting eps=1 QBER", 0.0, q, 0.0);
    push("P1 photon-number-splitting eps=1 I_AE", 0.75, i, 0.015);
    let (q, i) = checkpoint(Protocol::Two, Strategy::InterceptResendP2, derive_seed(seed, 3))?;
    push("P2 intercept-resend eps=1 QBER", 0.5, q, 0.015);
    push("P2 intercept-resend eps=1 I_AE", 1.0, i, 0.0);
    let (q, i) = checkpoint(Protocol::Two, Strategy::FirstQubitP2, derive_seed(seed, 4))?;
    push("P2 first-qubit eps=1 QBER", 0.0, q, 0.0);
    push("P2 first-qubit eps=1 I_AE", 0.75, i, 0.015);

    let mut rng = RandomSource::new(derive_seed(seed, 5));
    let mut corrupted = 0usize;
    for _ in 0..200 {
        let len = 8 + rng.below(4096);
        let message = rng.bits(len);
        let bundle = PacketBundle::seal(message.clone(), default_redundancy(len + HASH_BITS), &mut rng)?;
        let opened = PacketBundle::open(&bundle.transmitted, &bundle.redundancy.positions, &bundle.key);
        corrupted += usize::from(opened.as_ref() != Ok(&message));
    }
    push("pipeline round trip corruptions (200 packets)", 0.0, corrupted as f64, 0.0);

    Ok(Report { seed, checks })
}
