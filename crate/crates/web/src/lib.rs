//! Browser bindings. Every export takes plain numbers and strings and
//! returns a JSON string, so the page needs no generated type glue.

use dsqc::adversary::{Attack, Strategy};
use dsqc::classical::AbortPolicy;
use dsqc::harness::{parse_grid, run_session, run_sweep, Seeds, SessionConfig, SweepConfig};
use dsqc::{protocol1, protocol2, Protocol, Qubit, TwoQubitState};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_BITS: usize = 200_000;

fn protocol(n: u8) -> Result<Protocol, String> {
    Protocol::try_from(n).map_err(|e| e.to_string())
}

fn strategy(protocol: Protocol, attack: &str) -> Result<Strategy, String> {
    match (protocol, attack) {
        (_, "none") => Ok(Strategy::None),
        (Protocol::One, "ir") => Ok(Strategy::InterceptResendP1),
        (Protocol::One, "pns") => Ok(Strategy::PhotonNumberSplitP1 { p_dup: 1.0 }),
        (Protocol::Two, "ir") => Ok(Strategy::InterceptResendP2),
        (Protocol::Two, "fq") => Ok(Strategy::FirstQubitP2),
        (p, a) => Err(format!("attack {a:?} is not available for protocol {}", p.number())),
    }
}

fn check_bits(bits: usize) -> Result<(), String> {
    if bits == 0 || bits > MAX_BITS {
        return Err(format!("bits must be in 1..={MAX_BITS}"));
    }
    Ok(())
}

pub fn sweep_json(protocol_n: u8, attack: &str, grid: &str, bits: usize, seed: u32) -> Result<String, String> {
    check_bits(bits)?;
    let protocol = protocol(protocol_n)?;
    let cfg = SweepConfig {
        protocol,
        attack: Attack::new(strategy(protocol, attack)?, 0.0).map_err(|e| e.to_string())?,
        message_bits: bits,
        redundancy: None,
        noise: 0.0,
        abort_policy: AbortPolicy::zero_tolerance(),
        epsilons: parse_grid(grid).map_err(|e| e.to_string())?,
        trials: 1,
        seed: u64::from(seed),
    };
    let result = run_sweep(&cfg).map_err(|e| e.to_string())?;
    serde_json::to_string(&result.rows).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Branch {
    basis: String,
    /// Probabilities of outcomes 00, 01, 10, 11.
    probabilities: [f64; 4],
}

#[derive(Serialize)]
struct Codeword {
    label: String,
    bit: u8,
    amplitudes: [f64; 4],
    concurrence: f64,
    bob: Vec<Branch>,
}

fn real_parts(s: &TwoQubitState) -> [f64; 4] {
    s.amplitudes().map(|a| a.re)
}

pub fn codewords_json(protocol_n: u8) -> Result<String, String> {
    let mut out = Vec::new();
    match protocol(protocol_n)? {
        Protocol::One => {
            for bit in [false, true] {
                for r in [Qubit::First, Qubit::Second] {
                    let s = protocol1::encode_bit(bit, r);
                    let bob = [protocol1::Basis::Computational, protocol1::Basis::Hadamard]
                        .into_iter()
                        .map(|basis| Branch {
                            basis: format!("{basis:?}").to_lowercase(),
                            probabilities: protocol1::bob_rotate(&s, basis).probabilities(),
                        })
                        .collect();
                    out.push(Codeword {
                        label: format!("m={} H on qubit {}", u8::from(bit), r.index()),
                        bit: bit.into(),
                        amplitudes: real_parts(&s),
                        concurrence: s.concurrence(),
                        bob,
                    });
                }
            }
        }
        Protocol::Two => {
            for bit in [false, true] {
                for a in [false, true] {
                    let s = protocol2::encode_bit(bit, a);
                    let bob = [false, true]
                        .into_iter()
                        .map(|b| Branch {
                            basis: format!("b={}", u8::from(b)),
                            probabilities: protocol2::bob_rotate(&s, b).probabilities(),
                        })
                        .collect();
                    out.push(Codeword {
                        label: format!("m={} a={}", u8::from(bit), u8::from(a)),
                        bit: bit.into(),
                        amplitudes: real_parts(&s),
                        concurrence: s.concurrence(),
                        bob,
                    });
                }
            }
        }
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SessionSummary {
    status: &'static str,
    qber: f64,
    evan_known_fraction: f64,
    evan_certain_fraction: f64,
    intercepted: usize,
    pairs: usize,
    transcript_messages: usize,
}

pub fn session_json(protocol_n: u8, attack: &str, epsilon: f64, bits: usize, seed: u32) -> Result<String, String> {
    check_bits(bits)?;
    let protocol = protocol(protocol_n)?;
    let cfg = SessionConfig {
        protocol,
        message_bits: bits,
        attack: Attack::new(strategy(protocol, attack)?, epsilon).map_err(|e| e.to_string())?,
        seeds: Seeds::from_base(u64::from(seed)),
        ..SessionConfig::default()
    };
    let r = run_session(&cfg).map_err(|e| e.to_string())?;
    let status = if r.aborted() {
        "aborted"
    } else if r.delivery.is_delivered() {
        "delivered"
    } else {
        "hash mismatch"
    };
    let summary = SessionSummary {
        status,
        qber: r.qber,
        evan_known_fraction: r.evan_known_fraction,
        evan_certain_fraction: r.evan_certain_fraction,
        intercepted: r.message_block.intercepted(),
        pairs: r.message_block.sent.len(),
        transcript_messages: r.transcript.entries().len(),
    };
    serde_json::to_string(&summary).map_err(|e| e.to_string())
}

/// Runs an attack sweep and returns the rows as a JSON array.
#[wasm_bindgen]
pub fn sweep(protocol: u8, attack: &str, grid: &str, bits: usize, seed: u32) -> Result<String, JsValue> {
    sweep_json(protocol, attack, grid, bits, seed).map_err(|e| JsValue::from_str(&e))
}

/// Code states of one protocol with Bob's outcome distributions.
#[wasm_bindgen]
pub fn codewords(protocol: u8) -> Result<String, JsValue> {
    codewords_json(protocol).map_err(|e| JsValue::from_str(&e))
}

/// One full session with abort enforcement.
#[wasm_bindgen]
pub fn session(protocol: u8, attack: &str, epsilon: f64, bits: usize, seed: u32) -> Result<String, JsValue> {
    session_json(protocol, attack, epsilon, bits, seed).map_err(|e| JsValue::from_str(&e))
}
