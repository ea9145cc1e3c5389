use std::fs;

use anyhow::{Context, Result};
use dsqc::harness::{parse_grid, run_sweep, SweepConfig};

use crate::SweepArgs;

pub fn run(args: &SweepArgs) -> Result<bool> {
    let common = &args.common;
    let epsilons = parse_grid(&args.eps)?;
    let cfg = SweepConfig {
        protocol: common.protocol(),
        attack: common.attack(0.0)?,
        message_bits: common.bits,
        redundancy: common.redundancy,
        noise: common.noise,
        abort_policy: common.abort_policy()?,
        epsilons,
        trials: args.trials,
        seed: common.seed,
    };
    cfg.validate()?;
    // fail on an unwritable path before spending time on the sweep
    fs::write(&args.out, "").with_context(|| format!("cannot write {}", args.out.display()))?;

    let result = run_sweep(&cfg)?;
    fs::write(&args.out, result.to_csv()).with_context(|| format!("cannot write {}", args.out.display()))?;

    println!("wrote {} rows to {}", result.rows.len(), args.out.display());
    let row = result.rows.iter().find(|r| r.epsilon == 1.0).or(result.last()).expect("grid is nonempty");
    println!(
        "eps={:.6} qber={:.6} iae={:.6} detected_fraction={:.6}",
        row.epsilon, row.qber, row.iae, row.detected_fraction
    );
    Ok(true)
}
