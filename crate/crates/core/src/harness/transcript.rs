//! Typed messages on the public classical channel and their ordered log.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
}

/// Which packet a quantum block carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Message,
    Key,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ClassicalMessage {
    /// Alice: the last pair of a block has left.
    PacketSent {
        phase: Phase,
        pairs: usize,
    },
    /// Bob: pairs whose two outcomes agreed.
    AgreeIndices {
        phase: Phase,
        indices: Vec<usize>,
    },
    /// Alice: Hadamard qubit (1 or 2) for every pair Bob could not decode.
    BasisDisclosure {
        phase: Phase,
        choices: Vec<(usize, u8)>,
    },
    /// Alice: every code-family bit of the block.
    RngDisclosureP2 {
        phase: Phase,
        #[serde(with = "bitstring")]
        a_bits: Vec<bool>,
    },
    /// Alice: where the check bits sit and what they are.
    RedundancyReveal {
        positions: Vec<usize>,
        #[serde(with = "bitstring")]
        values: Vec<bool>,
    },
    /// Bob: his decoded values at the check positions.
    RedundancyReport {
        #[serde(with = "bitstring")]
        values: Vec<bool>,
    },
    Abort {
        mismatch_fraction: f64,
    },
    KeyPhaseStart,
    Done {
        verified: bool,
    },
}

impl ClassicalMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassicalMessage::PacketSent { .. } => "packet_sent",
            ClassicalMessage::AgreeIndices { .. } => "agree_indices",
            ClassicalMessage::BasisDisclosure { .. } => "basis_disclosure",
            ClassicalMessage::RngDisclosureP2 { .. } => "rng_disclosure_p2",
            ClassicalMessage::RedundancyReveal { .. } => "redundancy_reveal",
            ClassicalMessage::RedundancyReport { .. } => "redundancy_report",
            ClassicalMessage::Abort { .. } => "abort",
            ClassicalMessage::KeyPhaseStart => "key_phase_start",
            ClassicalMessage::Done { .. } => "done",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub seq: u64,
    pub sender: Party,
    #[serde(flatten)]
    pub message: ClassicalMessage,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, sender: Party, message: ClassicalMessage) {
        let seq = self.entries.len() as u64;
        self.entries.push(TranscriptEntry { seq, sender, message });
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, pred: impl Fn(&ClassicalMessage) -> bool) -> Option<usize> {
        self.entries.iter().position(|e| pred(&e.message))
    }

    pub fn contains(&self, pred: impl Fn(&ClassicalMessage) -> bool) -> bool {
        self.position(pred).is_some()
    }

    /// One JSON object per line: `{seq, sender, type, payload}`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            let line = serde_json::to_string(entry).expect("transcript entries serialize");
            writeln!(out, "{line}").expect("writing to a String");
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::InvalidConfig(format!("bad transcript line: {e}"))))
            .collect::<Result<Vec<TranscriptEntry>>>()?;
        Ok(Self { entries })
    }

    /// Checks that messages follow the protocol's step order.
    pub fn check_ordering(&self) -> std::result::Result<(), String> {
        let sent =
            |phase: Phase| self.position(|m| matches!(m, ClassicalMessage::PacketSent { phase: p, .. } if *p == phase));
        for (i, entry) in self.entries.iter().enumerate() {
            let needs_block = match &entry.message {
                ClassicalMessage::AgreeIndices { phase, .. }
                | ClassicalMessage::BasisDisclosure { phase, .. }
                | ClassicalMessage::RngDisclosureP2 { phase, .. } => Some(*phase),
                _ => None,
            };
            if let Some(phase) = needs_block {
                match sent(phase) {
                    Some(j) if j < i => {}
                    _ => {
                        return Err(format!(
                            "{} at seq {} precedes the end of its {:?} block",
                            entry.message.kind(),
                            entry.seq,
                            phase
                        ))
                    }
                }
            }
        }
        let reveal = self.position(|m| matches!(m, ClassicalMessage::RedundancyReveal { .. }));
        let key_start = self.position(|m| matches!(m, ClassicalMessage::KeyPhaseStart));
        let abort = self.position(|m| matches!(m, ClassicalMessage::Abort { .. }));
        if let Some(k) = key_start {
            match reveal {
                Some(r) if r < k => {}
                _ => return Err("key phase started before the redundancy check".into()),
            }
            if abort.is_some() {
                return Err("key phase present in an aborted session".into());
            }
            if let Some(j) = sent(Phase::Key) {
                if j < k {
                    return Err("key block sent before key phase start".into());
                }
            }
        } else if sent(Phase::Key).is_some() {
            return Err("key block sent without key phase start".into());
        }
        Ok(())
    }
}

/// Bit vectors as compact `"0101"` strings.
pub(crate) mod bitstring {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(de::Error::custom(format!("invalid bit {other:?}"))),
            })
            .collect()
    }
}
