use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dsqc::adversary::{Attack, Strategy};
use dsqc::classical::AbortPolicy;
use dsqc::harness::DEFAULT_MESSAGE_BITS;
use dsqc::Protocol;

mod send;
mod sweep;

#[derive(Parser, Debug)]
#[command(name = "dsqc", version, about = "Deterministic secure quantum communication simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the intervention rate and write a CSV of QBER and Evan's information.
    Sweep(SweepArgs),
    /// Send a file through simulated sessions, one packet at a time.
    Send(SendArgs),
    /// Run the built-in release checks.
    Selftest {
        #[arg(long, env = "DSQC_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    None,
    /// intercept-resend
    Ir,
    /// photon-number splitting (protocol 1)
    Pns,
    /// first-qubit diagonal measurement (protocol 2)
    Fq,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub protocol: u8,
    #[arg(long, value_enum, default_value_t = AttackKind::None)]
    pub attack: AttackKind,
    /// Probability that a tapped pulse carries a spare pair (pns only).
    #[arg(long, default_value_t = 1.0)]
    pub p_dup: f64,
    /// Message bits per packet.
    #[arg(long, default_value_t = DEFAULT_MESSAGE_BITS)]
    pub bits: usize,
    /// Check bits per packet [default: max(16, 5% of packet)].
    #[arg(long)]
    pub redundancy: Option<usize>,
    /// Per-qubit depolarizing probability.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Expected channel error rate for the abort threshold.
    #[arg(long, default_value_t = 0.0)]
    pub expected_error: f64,
    #[arg(long, env = "DSQC_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl Common {
    pub fn protocol(&self) -> Protocol {
        Protocol::try_from(self.protocol).expect("clap restricts the range")
    }

    pub fn strategy(&self) -> Result<Strategy> {
        let protocol = self.protocol();
        Ok(match (self.attack, protocol) {
            (AttackKind::None, _) => Strategy::None,
            (AttackKind::Ir, Protocol::One) => Strategy::InterceptResendP1,
            (AttackKind::Ir, Protocol::Two) => Strategy::InterceptResendP2,
            (AttackKind::Pns, Protocol::One) => Strategy::PhotonNumberSplitP1 { p_dup: self.p_dup },
            (AttackKind::Fq, Protocol::Two) => Strategy::FirstQubitP2,
            (AttackKind::Pns, Protocol::Two) => bail!("the pns attack applies to protocol 1 only"),
            (AttackKind::Fq, Protocol::One) => bail!("the fq attack applies to protocol 2 only"),
        })
    }

    pub fn attack(&self, epsilon: f64) -> Result<Attack> {
        Ok(Attack::new(self.strategy()?, epsilon)?)
    }

    pub fn abort_policy(&self) -> Result<AbortPolicy> {
        Ok(AbortPolicy::new(self.expected_error, 3.0)?)
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// A single rate or a grid "start:end:step".
    #[arg(long, default_value = "0:1:0.1")]
    pub eps: String,
    /// Sessions averaged per grid point.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SendArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Where Bob's reassembled file goes.
    #[arg(long)]
    pub out: PathBuf,
    /// Transcript path [default: <out>.transcript.jsonl].
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Intervention rate.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(args) => sweep::run(&args),
        Command::Send(args) => send::run(&args),
        Command::Selftest { seed } => selftest(seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn selftest(seed: u64) -> Result<bool> {
    let report = dsqc::selftest::run(seed)?;
    println!("{report}");
    Ok(report.passed())
}
