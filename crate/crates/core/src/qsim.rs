//! Exact pure-state simulation of a two-qubit register.
//!
//! Amplitudes are stored in the order `index = 2*q1 + q2`, where `q1` is the
//! left-written qubit of a ket: `|xy>` has its amplitude at index `2x + y`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::RandomSource;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which qubit of the pair a gate acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Qubit {
    First,
    Second,
}

impl Qubit {
    /// The 1-based label used in transcripts.
    pub fn index(self) -> u8 {
        match self {
            Qubit::First => 1,
            Qubit::Second => 2,
        }
    }

    pub fn other(self) -> Qubit {
        match self {
            Qubit::First => Qubit::Second,
            Qubit::Second => Qubit::First,
        }
    }

    /// Uniformly random qubit.
    pub fn random(rng: &mut RandomSource) -> Qubit {
        if rng.bit() {
            Qubit::Second
        } else {
            Qubit::First
        }
    }
}

impl TryFrom<u8> for Qubit {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Qubit::First),
            2 => Ok(Qubit::Second),
            other => Err(Error::InvalidQubit(other)),
        }
    }
}

/// Outcome of a measurement in the `{|+>, |->}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [Complex64; 4],
}

impl TwoQubitState {
    /// Computational basis state `|q1 q2>`.
    pub fn prepare(q1: bool, q2: bool) -> Self {
        let mut amps = [ZERO; 4];
        amps[basis_index(q1, q2)] = ONE;
        Self { amps }
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amps: [Complex64; 4]) -> Result<Self, Error> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::ZeroState);
        }
        Ok(Self { amps: amps.map(|a| a / norm) })
    }

    /// Real-amplitude convenience constructor; normalizes.
    pub fn from_real(amps: [f64; 4]) -> Result<Self, Error> {
        Self::from_amplitudes(amps.map(|a| Complex64::new(a, 0.0)))
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    pub fn amplitude(&self, q1: bool, q2: bool) -> Complex64 {
        self.amps[basis_index(q1, q2)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities of the four computational outcomes, indexed
    /// like the amplitudes.
    pub fn probabilities(&self) -> [f64; 4] {
        self.amps.map(|a| a.norm_sqr())
    }

    pub fn hadamard(&self, qubit: Qubit) -> Self {
        let mut out = self.amps;
        for (i, j) in pair_indices(qubit) {
            let (a, b) = (self.amps[i], self.amps[j]);
            out[i] = (a + b) * FRAC_1_SQRT_2;
            out[j] = (a - b) * FRAC_1_SQRT_2;
        }
        Self { amps: out }
    }

    pub fn hadamard_both(&self) -> Self {
        self.hadamard(Qubit::First).hadamard(Qubit::Second)
    }

    /// Controlled-Z: negates the `|11>` amplitude.
    pub fn cz(&self) -> Self {
        let mut amps = self.amps;
        amps[3] = -amps[3];
        Self { amps }
    }

    /// Controlled-Z whose control is a classical bit.
    pub fn cz_if(&self, control: bool) -> Self {
        if control {
            self.cz()
        } else {
            *self
        }
    }

    pub fn pauli(&self, op: Pauli, qubit: Qubit) -> Self {
        let mut out = self.amps;
        for (i, j) in pair_indices(qubit) {
            let (a, b) = (self.amps[i], self.amps[j]);
            match op {
                Pauli::X => {
                    out[i] = b;
                    out[j] = a;
                }
                // Y = [[0, -i], [i, 0]]
                Pauli::Y => {
                    out[i] = -Complex64::i() * b;
                    out[j] = Complex64::i() * a;
                }
                Pauli::Z => {
                    out[j] = -b;
                }
            }
        }
        Self { amps: out }
    }

    /// Samples a joint computational-basis outcome `(o1, o2)`.
    pub fn measure_both(&self, rng: &mut RandomSource) -> (bool, bool) {
        let probs = self.probabilities();
        let total: f64 = probs.iter().sum();
        let draw = rng.uniform() * total;
        let mut acc = 0.0;
        let mut chosen = 3;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if draw < acc {
                chosen = i;
                break;
            }
        }
        // Guard against landing on a zero-probability tail through rounding.
        if probs[chosen] == 0.0 {
            chosen = probs.iter().rposition(|&p| p > 0.0).expect("normalized state has a nonzero amplitude");
        }
        (chosen & 2 != 0, chosen & 1 != 0)
    }

    /// Projects the first qubit onto `|+>` or `|->`, returning the sign and
    /// the renormalized post-measurement state.
    pub fn measure_first_diagonal(&self, rng: &mut RandomSource) -> (Sign, Self) {
        // Rotate so the diagonal basis becomes computational, measure, and
        // rotate back.
        let rotated = self.hadamard(Qubit::First);
        let p_plus = rotated.amps[0].norm_sqr() + rotated.amps[1].norm_sqr();
        let p_minus = rotated.amps[2].norm_sqr() + rotated.amps[3].norm_sqr();
        let sign = if rng.uniform() * (p_plus + p_minus) < p_plus { Sign::Plus } else { Sign::Minus };
        let mut amps = rotated.amps;
        let (kill, keep_norm) = match sign {
            Sign::Plus => ([2, 3], p_plus.sqrt()),
            Sign::Minus => ([0, 1], p_minus.sqrt()),
        };
        for k in kill {
            amps[k] = ZERO;
        }
        let collapsed = Self { amps: amps.map(|a| a / keep_norm) };
        (sign, collapsed.hadamard(Qubit::First))
    }

    /// Pure-state concurrence `2 |det A|` with `A[q1][q2] = amp(q1, q2)`.
    pub fn concurrence(&self) -> f64 {
        let a = &self.amps;
        (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `true` iff `|<self|other>| >= 1 - tol`.
    pub fn equal_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.inner(other).norm() >= 1.0 - tol
    }
}

impl fmt::Display for TwoQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = ["00", "01", "10", "11"];
        let mut first = true;
        for (a, label) in self.amps.iter().zip(labels) {
            if a.norm_sqr() < 1e-24 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.im.abs() < 1e-12 {
                write!(f, "{:.4}|{label}>", a.re)?;
            } else {
                write!(f, "({:.4}{:+.4}i)|{label}>", a.re, a.im)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn basis_index(q1: bool, q2: bool) -> usize {
    2 * usize::from(q1) + usize::from(q2)
}

/// Index pairs `(bit=0, bit=1)` for the given qubit with the other fixed.
fn pair_indices(qubit: Qubit) -> [(usize, usize); 2] {
    match qubit {
        Qubit::First => [(0, 2), (1, 3)],
        Qubit::Second => [(0, 1), (2, 3)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;
    const H: f64 = FRAC_1_SQRT_2;

    fn real(s: &TwoQubitState) -> [f64; 4] {
        s.amplitudes().map(|a| {
            assert!(a.im.abs() < TOL);
            a.re
        })
    }

    fn assert_amps(s: &TwoQubitState, expected: [f64; 4]) {
        for (got, want) in real(s).iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = TOL);
        }
    }

    fn plus_minus(q1_minus: bool, q2_minus: bool) -> TwoQubitState {
        let mut s = TwoQubitState::prepare(q1_minus, q2_minus);
        s = s.hadamard_both();
        s
    }

    #[test]
    fn prepare_orders_amplitudes() {
        assert_amps(&TwoQubitState::prepare(false, false), [1.0, 0.0, 0.0, 0.0]);
        assert_amps(&TwoQubitState::prepare(true, false), [0.0, 0.0, 1.0, 0.0]);
        assert_amps(&TwoQubitState::prepare(true, true), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn hadamard_on_first_of_00() {
        let s = TwoQubitState::prepare(false, false).hadamard(Qubit::First);
        assert_amps(&s, [H, 0.0, H, 0.0]);
    }

    #[test]
    fn hadamard_turns_entangled_code_into_singlet_form() {
        // (|-0> - |+1>)/sqrt2 = [1, -1, -1, -1]/2
        let s = TwoQubitState::from_real([1.0, -1.0, -1.0, -1.0]).unwrap();
        let out = s.hadamard(Qubit::First);
        assert_amps(&out, [0.0, -H, H, 0.0]);
    }

    #[test]
    fn cz_examples() {
        let s = TwoQubitState::prepare(true, true).cz();
        assert_amps(&s, [0.0, 0.0, 0.0, -1.0]);
        let mm = plus_minus(true, true);
        assert_amps(&mm, [0.5, -0.5, -0.5, 0.5]);
        assert_amps(&mm.cz(), [0.5, -0.5, -0.5, -0.5]);
    }

    #[test]
    fn invalid_qubit_index_rejected() {
        assert!(Qubit::try_from(0).is_err());
        assert!(Qubit::try_from(3).is_err());
        assert_eq!(Qubit::try_from(2).unwrap(), Qubit::Second);
    }

    #[test]
    fn measure_basis_state_is_deterministic() {
        let mut rng = RandomSource::new(0);
        let s = TwoQubitState::prepare(false, true);
        for _ in 0..100 {
            assert_eq!(s.measure_both(&mut rng), (false, true));
        }
    }

    #[test]
    fn measure_singlet_form_anticorrelates() {
        let s = TwoQubitState::from_real([0.0, -1.0, 1.0, 0.0]).unwrap();
        let mut rng = RandomSource::new(11);
        let n = 10_000;
        let mut ones_first = 0;
        for _ in 0..n {
            let (o1, o2) = s.measure_both(&mut rng);
            assert_ne!(o1, o2);
            ones_first += usize::from(o1);
        }
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones_first as f64 - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn measure_one_minus() {
        // |1-> : first qubit fixed, second uniform
        let s = TwoQubitState::prepare(true, true).hadamard(Qubit::Second);
        let mut rng = RandomSource::new(5);
        let n = 10_000;
        let mut ones_second = 0;
        for _ in 0..n {
            let (o1, o2) = s.measure_both(&mut rng);
            assert!(o1);
            ones_second += usize::from(o2);
        }
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones_second as f64 - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn diagonal_measurement_on_eigenstates() {
        let mut rng = RandomSource::new(2);
        let plus_zero = TwoQubitState::prepare(false, false).hadamard(Qubit::First);
        let minus_minus = plus_minus(true, true);
        for _ in 0..50 {
            let (sign, after) = plus_zero.measure_first_diagonal(&mut rng);
            assert_eq!(sign, Sign::Plus);
            assert!(after.equal_up_to_phase(&plus_zero, TOL));
            let (sign, after) = minus_minus.measure_first_diagonal(&mut rng);
            assert_eq!(sign, Sign::Minus);
            assert!(after.equal_up_to_phase(&minus_minus, TOL));
        }
    }

    #[test]
    fn diagonal_measurement_on_entangled_code() {
        let s = TwoQubitState::from_real([1.0, -1.0, -1.0, -1.0]).unwrap();
        let minus_zero = TwoQubitState::prepare(true, false).hadamard(Qubit::First);
        let plus_one = TwoQubitState::prepare(false, true).hadamard(Qubit::First);
        let mut rng = RandomSource::new(9);
        let n = 10_000;
        let mut minus = 0;
        for _ in 0..n {
            let (sign, after) = s.measure_first_diagonal(&mut rng);
            match sign {
                Sign::Minus => {
                    minus += 1;
                    assert!(after.equal_up_to_phase(&minus_zero, TOL));
                }
                Sign::Plus => assert!(after.equal_up_to_phase(&plus_one, TOL)),
            }
        }
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((minus as f64 - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(plus_minus(false, true).concurrence(), 0.0, epsilon = TOL);
        let singlet = TwoQubitState::from_real([0.0, -1.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(singlet.concurrence(), 1.0, epsilon = TOL);
        let code = TwoQubitState::from_real([1.0, -1.0, -1.0, -1.0]).unwrap();
        assert_abs_diff_eq!(code.concurrence(), 1.0, epsilon = TOL);
    }

    #[test]
    fn phase_equality_examples() {
        let s = plus_minus(true, false);
        let neg = TwoQubitState::from_amplitudes(s.amplitudes().map(|a| -a)).unwrap();
        assert!(s.equal_up_to_phase(&s, 1e-6));
        assert!(s.equal_up_to_phase(&neg, 1e-6));
        let zz = TwoQubitState::prepare(false, false);
        let pz = zz.hadamard(Qubit::First);
        assert!(!zz.equal_up_to_phase(&pz, 1e-6));
    }

    #[test]
    fn y_is_i_x_z() {
        let s = TwoQubitState::from_real([0.3, 0.1, -0.5, 0.8]).unwrap();
        for q in [Qubit::First, Qubit::Second] {
            let y = s.pauli(Pauli::Y, q);
            let ixz = s.pauli(Pauli::Z, q).pauli(Pauli::X, q);
            for (a, b) in y.amplitudes().iter().zip(ixz.amplitudes()) {
                assert_abs_diff_eq!(a.re, (Complex64::i() * b).re, epsilon = TOL);
                assert_abs_diff_eq!(a.im, (Complex64::i() * b).im, epsilon = TOL);
            }
        }
    }

    fn arb_state() -> impl Strategy<Value = TwoQubitState> {
        prop::array::uniform8(-1.0f64..1.0)
            .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|v| {
                TwoQubitState::from_amplitudes([
                    Complex64::new(v[0], v[1]),
                    Complex64::new(v[2], v[3]),
                    Complex64::new(v[4], v[5]),
                    Complex64::new(v[6], v[7]),
                ])
                .unwrap()
            })
    }

    fn arb_qubit() -> impl Strategy<Value = Qubit> {
        prop_oneof![Just(Qubit::First), Just(Qubit::Second)]
    }

    fn arb_pauli() -> impl Strategy<Value = Pauli> {
        prop_oneof![Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
    }

    proptest! {
        #[test]
        fn gates_preserve_norm(s in arb_state(), q in arb_qubit(), p in arb_pauli()) {
            prop_assert!((s.hadamard(q).norm_sqr() - 1.0).abs() < TOL);
            prop_assert!((s.cz().norm_sqr() - 1.0).abs() < TOL);
            prop_assert!((s.pauli(p, q).norm_sqr() - 1.0).abs() < TOL);
        }

        #[test]
        fn gates_are_involutions(s in arb_state(), q in arb_qubit()) {
            let hh = s.hadamard(q).hadamard(q);
            let zz = s.cz().cz();
            for i in 0..4 {
                prop_assert!((hh.amplitudes()[i] - s.amplitudes()[i]).norm() < TOL);
                prop_assert!((zz.amplitudes()[i] - s.amplitudes()[i]).norm() < TOL);
            }
        }

        #[test]
        fn concurrence_invariant_under_local_hadamard(s in arb_state(), q in arb_qubit()) {
            prop_assert!((s.concurrence() - s.hadamard(q).concurrence()).abs() < TOL);
        }

        #[test]
        fn diagonal_eigenstate_survives_measurement(
            first_minus in any::<bool>(),
            b in prop::array::uniform4(-1.0f64..1.0),
            seed in any::<u64>(),
        ) {
            let second = [Complex64::new(b[0], b[1]), Complex64::new(b[2], b[3])];
            prop_assume!(second.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3);
            let sgn = if first_minus { -1.0 } else { 1.0 };
            let s = TwoQubitState::from_amplitudes([
                second[0], second[1], second[0] * sgn, second[1] * sgn,
            ]).unwrap();
            prop_assert!(s.concurrence() < 1e-9);
            let mut rng = RandomSource::new(seed);
            let (sign, after) = s.measure_first_diagonal(&mut rng);
            prop_assert_eq!(sign, if first_minus { Sign::Minus } else { Sign::Plus });
            prop_assert!(after.equal_up_to_phase(&s, TOL));
        }
    }

    #[test]
    fn born_rule_statistics_random_state() {
        let s = TwoQubitState::from_amplitudes([
            Complex64::new(0.1, 0.4),
            Complex64::new(-0.3, 0.0),
            Complex64::new(0.5, -0.2),
            Complex64::new(0.0, 0.6),
        ])
        .unwrap();
        let probs = s.probabilities();
        let n = 100_000;
        let mut counts = [0usize; 4];
        let mut rng = RandomSource::new(1234);
        for _ in 0..n {
            let (o1, o2) = s.measure_both(&mut rng);
            counts[basis_index(o1, o2)] += 1;
        }
        for (c, p) in counts.iter().zip(probs) {
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((*c as f64 - n as f64 * p).abs() <= 3.0 * sigma, "{c} vs {p}");
        }
    }
}
