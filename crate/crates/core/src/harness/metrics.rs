//! Error and information rates.

use crate::adversary::Estimate;
use crate::error::{Error, Result};

/// Fraction of positions where Bob's decoded bit differs from Alice's.
pub fn compute_qber(sent: &[bool], decoded: &[bool]) -> Result<f64> {
    if sent.len() != decoded.len() {
        return Err(Error::LengthMismatch { left: sent.len(), right: decoded.len() });
    }
    if sent.is_empty() {
        return Ok(0.0);
    }
    let errors = sent.iter().zip(decoded).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / sent.len() as f64)
}

/// Fraction of Alice's bits that Evan's decoder got right. Unknown
/// positions count as misses.
pub fn compute_iae(alice: &[bool], estimates: &[Estimate]) -> Result<f64> {
    rate(alice, estimates, |bit, est| est.bit() == Some(bit))
}

/// Fraction of Alice's bits Evan holds with certainty.
pub fn certain_fraction(alice: &[bool], estimates: &[Estimate]) -> Result<f64> {
    rate(alice, estimates, |_, est| est.is_certain())
}

/// Number of certain estimates that disagree with Alice's bit.
pub fn wrong_certain(alice: &[bool], estimates: &[Estimate]) -> usize {
    alice.iter().zip(estimates).filter(|(&bit, est)| matches!(est, Estimate::Certain(b) if *b != bit)).count()
}

fn rate(alice: &[bool], estimates: &[Estimate], hit: impl Fn(bool, &Estimate) -> bool) -> Result<f64> {
    if alice.len() != estimates.len() {
        return Err(Error::LengthMismatch { left: alice.len(), right: estimates.len() });
    }
    if alice.is_empty() {
        return Ok(0.0);
    }
    let hits = alice.iter().zip(estimates).filter(|(&b, e)| hit(b, e)).count();
    Ok(hits as f64 / alice.len() as f64)
}

/// Plug-in Shannon mutual information (bits per symbol) between Alice's
/// bits and Evan's estimate symbols. Reported alongside the decode rate;
/// guesses that carry no correlation contribute nothing here.
pub fn shannon_information(alice: &[bool], estimates: &[Estimate]) -> Result<f64> {
    if alice.len() != estimates.len() {
        return Err(Error::LengthMismatch { left: alice.len(), right: estimates.len() });
    }
    let n = alice.len();
    if n == 0 {
        return Ok(0.0);
    }
    let symbol = |e: &Estimate| match e {
        Estimate::Unknown => 0,
        Estimate::Certain(false) => 1,
        Estimate::Certain(true) => 2,
        Estimate::Guess(false) => 3,
        Estimate::Guess(true) => 4,
    };
    let mut joint = [[0usize; 5]; 2];
    for (&bit, est) in alice.iter().zip(estimates) {
        joint[usize::from(bit)][symbol(est)] += 1;
    }
    let nf = n as f64;
    let px: Vec<f64> = joint.iter().map(|row| row.iter().sum::<usize>() as f64 / nf).collect();
    let py: Vec<f64> = (0..5).map(|y| (joint[0][y] + joint[1][y]) as f64 / nf).collect();
    let mut info = 0.0;
    for x in 0..2 {
        for y in 0..5 {
            let pxy = joint[x][y] as f64 / nf;
            if pxy > 0.0 {
                info += pxy * (pxy / (px[x] * py[y])).log2();
            }
        }
    }
    Ok(info.max(0.0))
}
