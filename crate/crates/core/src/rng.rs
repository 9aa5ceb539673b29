//! Deterministic counter-based random generator.
//!
//! SplitMix64 is used everywhere randomness is needed: seeded schedules,
//! walk generation, and test data. It is stateless per draw (a pure function
//! of seed and counter), so replays are bit-identical across runs and
//! independent of threading.

use crate::subspace::Vector;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 output for the given state.
#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless draw: the `counter`-th output of the stream with the given seed.
#[inline]
pub fn stateless(seed: u64, counter: u64) -> u64 {
    splitmix64(seed.wrapping_add(GOLDEN.wrapping_mul(counter)))
}

/// Sequential SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in 0..n.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Standard Gaussian via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let mut u1 = self.next_f64();
        if u1 < 1e-300 {
            u1 = 1e-300;
        }
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Gaussian vector with independent entries.
    pub fn gaussian_vector(&mut self, dim: usize) -> Vector {
        Vector::from_fn(dim, |_, _| self.next_gaussian())
    }

    /// Uniform unit vector (normalized Gaussian).
    pub fn unit_vector(&mut self, dim: usize) -> Vector {
        loop {
            let v = self.gaussian_vector(dim);
            let n = v.norm();
            if n > 1e-12 {
                return v / n;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_index(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stateless_matches_repeat_draws() {
        assert_eq!(stateless(42, 7), stateless(42, 7));
        assert_ne!(stateless(42, 7), stateless(42, 8));
        assert_ne!(stateless(42, 7), stateless(43, 7));
    }

    #[test]
    fn unit_vectors_are_unit() {
        let mut rng = SplitMix64::new(1);
        for dim in [1usize, 2, 17] {
            let v = rng.unit_vector(dim);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}
