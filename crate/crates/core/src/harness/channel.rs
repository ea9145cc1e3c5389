use crate::error::{check_probability, Result};
use crate::qsim::{Pauli, Qubit, TwoQubitState};
use crate::rng::RandomSource;

/// Independent single-qubit depolarizing noise: each qubit, with probability
/// `p`, suffers a uniformly chosen X, Y or Z.
pub fn apply_channel_noise(state: &TwoQubitState, p: f64, rng: &mut RandomSource) -> Result<TwoQubitState> {
    check_probability("noise", p)?;
    let mut out = *state;
    for qubit in [Qubit::First, Qubit::Second] {
        if rng.bernoulli(p) {
            let op = match rng.below(3) {
                0 => Pauli::X,
                1 => Pauli::Y,
                _ => Pauli::Z,
            };
            out = out.pauli(op, qubit);
        }
    }
    Ok(out)
}
