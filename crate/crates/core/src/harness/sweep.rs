//! Monte Carlo sweeps over the intervention rate.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::adversary::Attack;
use crate::classical::{AbortPolicy, CheckOutcome};
use crate::error::{check_probability, Error, Result};
use crate::harness::session::{run_session, Seeds, SessionConfig};
use crate::rng::derive_seed;
use crate::Protocol;

pub const CSV_HEADER: &str = "epsilon,qber,iae,detected_fraction,n_bits,seed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub qber: f64,
    pub iae: f64,
    /// Fraction of trials whose redundancy check would have aborted.
    pub detected_fraction: f64,
    /// Message bits per trial.
    pub n_bits: usize,
    /// Seed that reproduces this row.
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{CSV_HEADER}").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:.6},{:.6},{:.6},{:.6},{},{}",
                r.epsilon, r.qber, r.iae, r.detected_fraction, r.n_bits, r.seed
            )
            .unwrap();
        }
        out
    }

    pub fn last(&self) -> Option<&SweepRow> {
        self.rows.last()
    }

    /// Least-squares `(slope, intercept)` of the given column against
    /// epsilon.
    pub fn fit(&self, column: impl Fn(&SweepRow) -> f64) -> Option<(f64, f64)> {
        let n = self.rows.len() as f64;
        if self.rows.len() < 2 {
            return None;
        }
        let mx = self.rows.iter().map(|r| r.epsilon).sum::<f64>() / n;
        let my = self.rows.iter().map(&column).sum::<f64>() / n;
        let sxx: f64 = self.rows.iter().map(|r| (r.epsilon - mx).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let sxy: f64 = self.rows.iter().map(|r| (r.epsilon - mx) * (column(r) - my)).sum();
        let slope = sxy / sxx;
        Some((slope, my - slope * mx))
    }
}

/// A sweep: one session template, a grid of intervention rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub protocol: Protocol,
    /// Attack whose `epsilon` is overwritten per grid point.
    pub attack: Attack,
    pub message_bits: usize,
    pub redundancy: Option<usize>,
    pub noise: f64,
    pub abort_policy: AbortPolicy,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::InvalidConfig("epsilon grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        for &e in &self.epsilons {
            check_probability("epsilon", e)?;
        }
        if self.epsilons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("epsilon grid must be strictly ascending".into()));
        }
        self.session(0, 0)?.validate()
    }

    fn point_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, index as u64)
    }

    fn session(&self, index: usize, trial: usize) -> Result<SessionConfig> {
        let epsilon = self.epsilons[index];
        Ok(SessionConfig {
            protocol: self.protocol,
            message_bits: self.message_bits,
            redundancy: self.redundancy,
            attack: Attack::new(self.attack.strategy, epsilon)?,
            noise: self.noise,
            abort_policy: self.abort_policy,
            enforce_abort: false,
            seeds: Seeds::from_base(derive_seed(self.point_seed(index), trial as u64)),
        })
    }

    fn run_point(&self, index: usize) -> Result<SweepRow> {
        let (mut qber, mut iae, mut detected) = (0.0, 0.0, 0usize);
        for trial in 0..self.trials {
            let result = run_session(&self.session(index, trial)?)?;
            qber += result.qber;
            iae += result.evan_known_fraction;
            detected += usize::from(matches!(result.check, CheckOutcome::Abort { .. }));
        }
        let t = self.trials as f64;
        Ok(SweepRow {
            epsilon: self.epsilons[index],
            qber: qber / t,
            iae: iae / t,
            detected_fraction: detected as f64 / t,
            n_bits: self.message_bits,
            seed: self.point_seed(index),
        })
    }
}

/// Runs every grid point with the abort disabled, so that error and
/// information rates can be read off at any intervention rate. Rows come
/// back in grid order regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let indices: Vec<usize> = (0..cfg.epsilons.len()).collect();
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        indices.par_iter().map(|&i| cfg.run_point(i)).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows = indices.iter().map(|&i| cfg.run_point(i)).collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

/// Parses `"0.5"` or `"start:end:step"` into an ascending grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::InvalidConfig(format!("grid {text:?}: {why}"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("{s:?} is not a number")));
    let grid = match parts.as_slice() {
        [single] => vec![num(single)?],
        [start, end, step] => {
            let (start, end, step) = (num(start)?, num(end)?, num(step)?);
            if !(step > 0.0 && step.is_finite()) {
                return Err(bad("step must be positive"));
            }
            if end < start {
                return Err(bad("end must not be below start"));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            (0..count)
                .map(|i| {
                    let v = start + i as f64 * step;
                    // snap away accumulated rounding like 0.30000000000000004
                    (v * 1e9).round() / 1e9
                })
                .collect()
        }
        _ => return Err(bad("expected a value or start:end:step")),
    };
    for &e in &grid {
        check_probability("epsilon", e)?;
    }
    Ok(grid)
}

/// Measures Bob's error rate with no eavesdropper at the given noise level,
/// for seeding an [`AbortPolicy`].
pub fn calibrate_error_rate(
    protocol: Protocol,
    noise: f64,
    message_bits: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let cfg = SweepConfig {
        protocol,
        attack: Attack::none(),
        message_bits,
        redundancy: None,
        noise,
        abort_policy: AbortPolicy::zero_tolerance(),
        epsilons: vec![0.0],
        trials,
        seed,
    };
    Ok(run_sweep(&cfg)?.rows[0].qber)
}
