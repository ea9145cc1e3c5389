//! Classical pre- and post-processing around the quantum encoder: hashing,
//! one-time-pad encryption, redundancy-bit insertion and the abort decision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Width of the packet hash in bits.
pub const HASH_BITS: usize = 32;

/// Packs bits MSB-first into bytes, zero-padding the final byte.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| chunk.iter().enumerate().fold(0u8, |byte, (i, &b)| byte | (u8::from(b) << (7 - i))))
        .collect()
}

/// Unpacks bytes MSB-first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes.iter().flat_map(|&byte| (0..8).rev().map(move |i| byte >> i & 1 == 1)).collect()
}

fn u32_to_bits(value: u32) -> Vec<bool> {
    (0..32).rev().map(|i| value >> i & 1 == 1).collect()
}

fn bits_to_u32(bits: &[bool]) -> u32 {
    bits.iter().fold(0, |acc, &b| acc << 1 | u32::from(b))
}

/// CRC-32/IEEE of the message packed MSB-first. Messages whose length is not
/// a multiple of 8 are zero-padded, so the caller must carry the true length.
pub fn compute_hash(message: &[bool]) -> u32 {
    crc32fast::hash(&bits_to_bytes(message))
}

/// Bitwise XOR of equal-length sequences.
pub fn otp_apply(data: &[bool], key: &[bool]) -> Result<Vec<bool>> {
    if data.len() != key.len() {
        return Err(Error::LengthMismatch { left: data.len(), right: key.len() });
    }
    Ok(data.iter().zip(key).map(|(d, k)| d ^ k).collect())
}

pub fn generate_key(len: usize, rng: &mut RandomSource) -> Result<Vec<bool>> {
    if len == 0 {
        return Err(Error::EmptyKey);
    }
    Ok(rng.bits(len))
}

/// Check bits hidden inside a transmitted packet, in transmitted-packet
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Redundancy {
    pub positions: Vec<usize>,
    pub values: Vec<bool>,
}

impl Redundancy {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Reads the bits at the check positions out of a (decoded) packet.
    pub fn read_from(&self, transmitted: &[bool]) -> Result<Vec<bool>> {
        validate_positions(&self.positions, transmitted.len())?;
        Ok(self.positions.iter().map(|&p| transmitted[p]).collect())
    }
}

/// Default number of check bits for a cipher packet of `cipher_len` bits.
pub fn default_redundancy(cipher_len: usize) -> usize {
    (cipher_len * 5).div_ceil(100).max(16)
}

/// Inserts `k` random bits at uniformly random slots of the final sequence.
pub fn insert_redundancy(packet: &[bool], k: usize, rng: &mut RandomSource) -> Result<(Vec<bool>, Redundancy)> {
    if k == 0 {
        return Err(Error::NoRedundancy);
    }
    let positions = rng.distinct_sorted(packet.len() + k, k);
    let values = rng.bits(k);
    let redundancy = Redundancy { positions, values };
    let transmitted = insert_redundancy_at(packet, &redundancy)?;
    Ok((transmitted, redundancy))
}

/// Deterministic insertion at given positions (ascending, in output
/// coordinates).
pub fn insert_redundancy_at(packet: &[bool], redundancy: &Redundancy) -> Result<Vec<bool>> {
    if redundancy.positions.len() != redundancy.values.len() {
        return Err(Error::LengthMismatch { left: redundancy.positions.len(), right: redundancy.values.len() });
    }
    let total = packet.len() + redundancy.len();
    validate_positions(&redundancy.positions, total)?;
    let mut out = Vec::with_capacity(total);
    let mut payload = packet.iter();
    let mut checks = redundancy.positions.iter().zip(&redundancy.values).peekable();
    for slot in 0..total {
        match checks.peek() {
            Some((&pos, &value)) if pos == slot => {
                out.push(value);
                checks.next();
            }
            _ => out.push(*payload.next().expect("slot count matches payload")),
        }
    }
    Ok(out)
}

pub fn strip_redundancy(transmitted: &[bool], positions: &[usize]) -> Result<Vec<bool>> {
    validate_positions(positions, transmitted.len())?;
    let mut drop = positions.iter().peekable();
    Ok(transmitted
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            if drop.peek() == Some(&i) {
                drop.next();
                false
            } else {
                true
            }
        })
        .map(|(_, &b)| b)
        .collect())
}

fn validate_positions(positions: &[usize], len: usize) -> Result<()> {
    for (i, &p) in positions.iter().enumerate() {
        if p >= len {
            return Err(Error::PositionOutOfRange { position: p, len });
        }
        if i > 0 && positions[i - 1] >= p {
            return Err(Error::PositionsNotAscending(i));
        }
    }
    Ok(())
}

/// Decides when check-bit disagreement means an eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbortPolicy {
    pub expected_error_rate: f64,
    pub sigma_margin: f64,
}

impl Default for AbortPolicy {
    fn default() -> Self {
        Self::zero_tolerance()
    }
}

impl AbortPolicy {
    pub fn new(expected_error_rate: f64, sigma_margin: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&expected_error_rate) {
            return Err(Error::InvalidProbability { name: "expected_error_rate", value: expected_error_rate });
        }
        if !(sigma_margin >= 0.0 && sigma_margin.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma_margin must be a finite non-negative number, got {sigma_margin}"
            )));
        }
        Ok(Self { expected_error_rate, sigma_margin })
    }

    /// Any mismatch aborts.
    pub fn zero_tolerance() -> Self {
        Self { expected_error_rate: 0.0, sigma_margin: 3.0 }
    }

    /// Largest mismatch fraction that still proceeds, for `k` check bits.
    pub fn threshold(&self, k: usize) -> f64 {
        let e = self.expected_error_rate;
        if k == 0 {
            return e.clamp(0.0, 1.0);
        }
        let spread = (e * (1.0 - e) / k as f64).sqrt();
        (e + self.sigma_margin * spread).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CheckOutcome {
    Proceed { mismatch_fraction: f64 },
    Abort { mismatch_fraction: f64 },
}

impl CheckOutcome {
    pub fn is_abort(&self) -> bool {
        matches!(self, CheckOutcome::Abort { .. })
    }

    pub fn mismatch_fraction(&self) -> f64 {
        match *self {
            CheckOutcome::Proceed { mismatch_fraction } | CheckOutcome::Abort { mismatch_fraction } => {
                mismatch_fraction
            }
        }
    }
}

/// Compares Alice's and Bob's check-bit values; aborts when the mismatch
/// fraction is strictly above the policy threshold.
pub fn check_redundancy(alice_values: &[bool], bob_values: &[bool], policy: &AbortPolicy) -> Result<CheckOutcome> {
    if alice_values.len() != bob_values.len() {
        return Err(Error::LengthMismatch { left: alice_values.len(), right: bob_values.len() });
    }
    let k = alice_values.len();
    if k == 0 {
        return Err(Error::NoRedundancy);
    }
    let mismatches = alice_values.iter().zip(bob_values).filter(|(a, b)| a != b).count();
    let mismatch_fraction = mismatches as f64 / k as f64;
    if mismatch_fraction > policy.threshold(k) {
        Ok(CheckOutcome::Abort { mismatch_fraction })
    } else {
        Ok(CheckOutcome::Proceed { mismatch_fraction })
    }
}

/// Appends the 32-bit hash to the message.
pub fn append_hash(message: &[bool]) -> Vec<bool> {
    let mut sealed = message.to_vec();
    sealed.extend(u32_to_bits(compute_hash(message)));
    sealed
}

/// Splits `C = M || S` and checks `S` against a fresh hash of `M`.
pub fn verify_packet(sealed: &[bool]) -> Result<Vec<bool>> {
    if sealed.len() <= HASH_BITS {
        return Err(Error::PacketTooShort(sealed.len()));
    }
    let (message, tail) = sealed.split_at(sealed.len() - HASH_BITS);
    let received = bits_to_u32(tail);
    let computed = compute_hash(message);
    if received == computed {
        Ok(message.to_vec())
    } else {
        Err(Error::HashMismatch { received, computed })
    }
}

/// Everything Alice derives from one message packet before transmission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketBundle {
    /// M
    pub message: Vec<bool>,
    /// S
    pub hash: u32,
    /// C = M || S
    pub sealed: Vec<bool>,
    /// K, same length as C
    pub key: Vec<bool>,
    /// P = K xor C
    pub cipher: Vec<bool>,
    /// T = P with check bits inserted
    pub transmitted: Vec<bool>,
    pub redundancy: Redundancy,
}

impl PacketBundle {
    /// Hashes, encrypts with a fresh one-time pad and inserts `k` check bits.
    pub fn seal(message: Vec<bool>, k: usize, rng: &mut RandomSource) -> Result<Self> {
        let hash = compute_hash(&message);
        let sealed = append_hash(&message);
        let key = generate_key(sealed.len(), rng)?;
        let cipher = otp_apply(&sealed, &key)?;
        let (transmitted, redundancy) = insert_redundancy(&cipher, k, rng)?;
        Ok(Self { message, hash, sealed, key, cipher, transmitted, redundancy })
    }

    /// Bob's side: strip check bits, decrypt, verify.
    pub fn open(transmitted: &[bool], positions: &[usize], key: &[bool]) -> Result<Vec<bool>> {
        let cipher = strip_redundancy(transmitted, positions)?;
        let sealed = otp_apply(&cipher, key)?;
        verify_packet(&sealed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn crc_check_value() {
        assert_eq!(compute_hash(&bytes_to_bits(b"123456789")), 0xCBF4_3926);
        assert_eq!(compute_hash(&[]), 0);
    }

    #[test]
    fn every_single_bit_flip_changes_hash() {
        let mut rng = RandomSource::new(17);
        let m = rng.bits(1000);
        let base = compute_hash(&m);
        for i in 0..m.len() {
            let mut flipped = m.clone();
            flipped[i] = !flipped[i];
            assert_ne!(compute_hash(&flipped), base, "flip at {i}");
        }
    }

    #[test]
    fn otp_examples() {
        assert_eq!(otp_apply(&bits("1011"), &bits("0000")).unwrap(), bits("1011"));
        assert_eq!(otp_apply(&bits("1100"), &bits("1010")).unwrap(), bits("0110"));
        assert!(matches!(otp_apply(&bits("10"), &bits("1")), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn key_generation() {
        let a = generate_key(10_000, &mut RandomSource::new(5)).unwrap();
        let b = generate_key(10_000, &mut RandomSource::new(5)).unwrap();
        assert_eq!(a, b);
        let ones = a.iter().filter(|&&x| x).count() as f64;
        assert!((ones - 5000.0).abs() <= 150.0, "popcount {ones}");
        let c = generate_key(10_000, &mut RandomSource::new(6)).unwrap();
        let dist = a.iter().zip(&c).filter(|(x, y)| x != y).count() as f64;
        assert!((dist - 5000.0).abs() <= 150.0, "hamming {dist}");
        assert_eq!(generate_key(0, &mut RandomSource::new(1)), Err(Error::EmptyKey));
    }

    #[test]
    fn forced_single_insertion() {
        let r = Redundancy { positions: vec![0], values: vec![true] };
        let t = insert_redundancy_at(&bits("101"), &r).unwrap();
        assert_eq!(t, bits("1101"));
        assert_eq!(strip_redundancy(&t, &[0]).unwrap(), bits("101"));
    }

    #[test]
    fn strip_edge_cases() {
        let t = bits("1101");
        assert_eq!(strip_redundancy(&t, &[]).unwrap(), t);
        assert!(matches!(strip_redundancy(&t, &[5]), Err(Error::PositionOutOfRange { .. })));
        assert!(matches!(strip_redundancy(&t, &[1, 1]), Err(Error::PositionsNotAscending(1))));
        assert!(matches!(strip_redundancy(&t, &[2, 1]), Err(Error::PositionsNotAscending(1))));
    }

    #[test]
    fn zero_redundancy_rejected() {
        assert_eq!(insert_redundancy(&bits("1"), 0, &mut RandomSource::new(0)).unwrap_err(), Error::NoRedundancy);
    }

    #[test]
    fn insert_strip_inverse_many() {
        let mut rng = RandomSource::new(99);
        for _ in 0..1000 {
            let len = rng.below(200);
            let k = 1 + rng.below(40);
            let p = rng.bits(len);
            let (t, r) = insert_redundancy(&p, k, &mut rng).unwrap();
            assert_eq!(t.len(), p.len() + k);
            assert_eq!(r.read_from(&t).unwrap(), r.values);
            assert_eq!(strip_redundancy(&t, &r.positions).unwrap(), p);
        }
    }

    #[test]
    fn threshold_formula() {
        assert_eq!(AbortPolicy::zero_tolerance().threshold(100), 0.0);
        let p = AbortPolicy::new(0.05, 3.0).unwrap();
        let expected = 0.05 + 3.0 * (0.0475f64 / 100.0).sqrt();
        assert!((p.threshold(100) - expected).abs() < 1e-12);
        assert!((p.threshold(100) - 0.115).abs() < 1e-3);
        assert!(AbortPolicy::new(1.0, 3.0).is_err());
        assert!(AbortPolicy::new(0.1, -1.0).is_err());
    }

    #[test]
    fn check_examples() {
        let a = vec![true; 100];
        let same = check_redundancy(&a, &a, &AbortPolicy::zero_tolerance()).unwrap();
        assert_eq!(same, CheckOutcome::Proceed { mismatch_fraction: 0.0 });

        let mut b = a.clone();
        b[..25].iter_mut().for_each(|x| *x = false);
        let out = check_redundancy(&a, &b, &AbortPolicy::zero_tolerance()).unwrap();
        assert_eq!(out, CheckOutcome::Abort { mismatch_fraction: 0.25 });

        let mut c = a.clone();
        c[..2].iter_mut().for_each(|x| *x = false);
        let out = check_redundancy(&a, &c, &AbortPolicy::new(0.05, 3.0).unwrap()).unwrap();
        assert_eq!(out, CheckOutcome::Proceed { mismatch_fraction: 0.02 });
    }

    #[test]
    fn check_is_monotone() {
        let policy = AbortPolicy::new(0.05, 3.0).unwrap();
        let a = vec![false; 100];
        let mut aborted = false;
        for n in 0..=100 {
            let mut b = a.clone();
            b[..n].iter_mut().for_each(|x| *x = true);
            let out = check_redundancy(&a, &b, &policy).unwrap();
            assert!(!(aborted && !out.is_abort()), "flipped back at {n}");
            aborted = out.is_abort();
        }
        assert!(aborted);
    }

    #[test]
    fn verify_round_trip_and_bounds() {
        let mut rng = RandomSource::new(4);
        let m = rng.bits(57);
        assert_eq!(verify_packet(&append_hash(&m)).unwrap(), m);
        assert_eq!(verify_packet(&[false; 32]), Err(Error::PacketTooShort(32)));
    }

    #[test]
    fn verify_catches_every_flip_at_1032() {
        let mut rng = RandomSource::new(8);
        let c = append_hash(&rng.bits(1000));
        assert_eq!(c.len(), 1032);
        for i in 0..c.len() {
            let mut bad = c.clone();
            bad[i] = !bad[i];
            assert!(matches!(verify_packet(&bad), Err(Error::HashMismatch { .. })), "flip at {i} not caught");
        }
    }

    #[test]
    fn bundle_invariants() {
        let mut rng = RandomSource::new(12);
        let m = rng.bits(300);
        let k = default_redundancy(332);
        let b = PacketBundle::seal(m.clone(), k, &mut rng).unwrap();
        assert_eq!(b.sealed.len(), m.len() + 32);
        assert_eq!(b.key.len(), b.sealed.len());
        assert_eq!(b.cipher.len(), b.sealed.len());
        assert_eq!(b.transmitted.len(), b.cipher.len() + k);
        assert_eq!(otp_apply(&b.cipher, &b.key).unwrap(), b.sealed);
        assert_eq!(strip_redundancy(&b.transmitted, &b.redundancy.positions).unwrap(), b.cipher);
        assert_eq!(PacketBundle::open(&b.transmitted, &b.redundancy.positions, &b.key).unwrap(), m);
    }

    #[test]
    fn default_redundancy_floor() {
        assert_eq!(default_redundancy(10), 16);
        assert_eq!(default_redundancy(10_032), 502);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pipeline_round_trip(len in 8usize..16_384, seed in any::<u64>()) {
            let mut rng = RandomSource::new(seed);
            let m = rng.bits(len);
            let k = default_redundancy(len + HASH_BITS);
            let b = PacketBundle::seal(m.clone(), k, &mut rng).unwrap();
            prop_assert_eq!(
                PacketBundle::open(&b.transmitted, &b.redundancy.positions, &b.key).unwrap(),
                m
            );
        }

        #[test]
        fn otp_is_involution(len in 0usize..2048, seed in any::<u64>()) {
            let mut rng = RandomSource::new(seed);
            let x = rng.bits(len);
            let k = rng.bits(len);
            prop_assert_eq!(otp_apply(&otp_apply(&x, &k).unwrap(), &k).unwrap(), x);
        }

        #[test]
        fn bit_packing_round_trips(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
            prop_assert_eq!(bits_to_bytes(&bytes_to_bits(&bytes)), bytes);
        }
    }
}
