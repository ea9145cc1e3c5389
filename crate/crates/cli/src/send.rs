use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use dsqc::classical::{bits_to_bytes, bytes_to_bits};
use dsqc::harness::{certain_fraction, run_session_with_message, Delivery, Seeds, SessionConfig};
use dsqc::rng::derive_seed;
use serde_json::{json, Value};

use crate::SendArgs;

fn transcript_path(args: &SendArgs) -> PathBuf {
    args.transcript.clone().unwrap_or_else(|| {
        let mut name = args.out.clone().into_os_string();
        name.push(".transcript.jsonl");
        PathBuf::from(name)
    })
}

pub fn run(args: &SendArgs) -> Result<bool> {
    let common = &args.common;
    let data = fs::read(&args.input).with_context(|| format!("cannot read {}", args.input.display()))?;
    let transcript_out = transcript_path(args);
    for path in [&args.out, &transcript_out] {
        fs::write(path, b"").with_context(|| format!("cannot write {}", path.display()))?;
    }

    let template = SessionConfig {
        protocol: common.protocol(),
        message_bits: common.bits,
        redundancy: common.redundancy,
        attack: common.attack(args.eps)?,
        noise: common.noise,
        abort_policy: common.abort_policy()?,
        enforce_abort: true,
        seeds: Seeds::from_base(common.seed),
    };
    template.validate()?;

    let file_bits = bytes_to_bits(&data);
    let packets: Vec<&[bool]> = file_bits.chunks(common.bits).collect();
    let mut lines: Vec<Value> = vec![json!({
        "type": "header",
        "file_bytes": data.len(),
        "file_bits": file_bits.len(),
        "packet_bits": common.bits,
        "packets": packets.len(),
        "last_packet_bits": packets.last().map_or(0, |p| p.len()),
        "protocol": common.protocol,
        "attack": template.attack,
        "seed": common.seed,
    })];

    let mut delivered_bits = Vec::with_capacity(file_bits.len());
    let mut failure = None;
    let (mut known, mut certain, mut total) = (0.0, 0.0, 0usize);
    for (index, packet) in packets.iter().enumerate() {
        let mut message = packet.to_vec();
        message.resize(common.bits, false);
        let cfg = SessionConfig { seeds: Seeds::from_base(derive_seed(common.seed, index as u64)), ..template.clone() };
        let result = run_session_with_message(&cfg, message)?;
        for entry in result.transcript.entries() {
            let mut line = serde_json::to_value(entry)?;
            line["packet"] = json!(index);
            lines.push(line);
        }
        let block = &result.message_block;
        let n = block.sent.len();
        let certain_here = certain_fraction(&block.sent, &block.estimates)?;
        lines.push(json!({
            "type": "evan_summary",
            "packet": index,
            "intercepted": block.intercepted(),
            "known_fraction": result.evan_known_fraction,
            "certain_fraction": certain_here,
        }));
        known += result.evan_known_fraction * n as f64;
        certain += certain_here * n as f64;
        total += n;

        match result.delivery {
            Delivery::Delivered { message } => delivered_bits.extend_from_slice(&message[..packet.len()]),
            Delivery::Aborted { mismatch_fraction } => {
                failure = Some(format!(
                    "packet {index}: aborted, check-bit mismatch {mismatch_fraction:.4} exceeds threshold"
                ));
                break;
            }
            Delivery::HashMismatch => {
                failure = Some(format!("packet {index}: hash mismatch after decryption"));
                break;
            }
        }
    }
    let denom = total.max(1) as f64;
    lines.push(json!({
        "type": "evan_summary_total",
        "known_fraction": known / denom,
        "certain_fraction": certain / denom,
    }));

    let mut text = String::new();
    for line in &lines {
        text.push_str(&serde_json::to_string(line)?);
        text.push('\n');
    }
    fs::write(&transcript_out, text).with_context(|| format!("cannot write {}", transcript_out.display()))?;

    println!("evan known fraction {:.6}", known / denom);
    match failure {
        Some(reason) => {
            eprintln!("{reason}");
            Ok(false)
        }
        None => {
            fs::write(&args.out, bits_to_bytes(&delivered_bits))
                .with_context(|| format!("cannot write {}", args.out.display()))?;
            println!("delivered {} bytes in {} packets to {}", data.len(), packets.len(), args.out.display());
            Ok(true)
        }
    }
}
