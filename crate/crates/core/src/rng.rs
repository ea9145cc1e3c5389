//! Seeded random streams.
//!
//! Every party in a session owns its own [`RandomSource`]; nothing in the
//! crate draws from a global generator, so a session is a pure function of
//! its seeds.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic stream of uniform bits and reals.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A fair coin.
    pub fn bit(&mut self) -> bool {
        self.inner.random::<bool>()
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// `true` with probability `p`. Values outside `[0, 1]` saturate.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            self.uniform() < p
        }
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn bits(&mut self, n: usize) -> Vec<bool> {
        (0..n).map(|_| self.bit()).collect()
    }

    /// `amount` distinct indices from `0..length`, sorted ascending.
    pub fn distinct_sorted(&mut self, length: usize, amount: usize) -> Vec<usize> {
        let mut picked = index::sample(&mut self.inner, length, amount).into_vec();
        picked.sort_unstable();
        picked
    }
}

/// Mixes a base seed with a stream label into an independent child seed
/// (SplitMix64 finalizer).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(7);
        let mut b = RandomSource::new(7);
        for _ in 0..1000 {
            assert_eq!(a.bit(), b.bit());
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn bernoulli_edges() {
        let mut rng = RandomSource::new(1);
        assert!((0..100).all(|_| !rng.bernoulli(0.0)));
        assert!((0..100).all(|_| rng.bernoulli(1.0)));
    }

    #[test]
    fn distinct_sorted_is_sorted_and_unique() {
        let mut rng = RandomSource::new(3);
        let picked = rng.distinct_sorted(100, 40);
        assert_eq!(picked.len(), 40);
        assert!(picked.windows(2).all(|w| w[0] < w[1]));
        assert!(picked.iter().all(|&i| i < 100));
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: Vec<u64> = (0..64).map(|s| derive_seed(42, s)).collect();
        for i in 0..seeds.len() {
            for j in i + 1..seeds.len() {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
    }
}
