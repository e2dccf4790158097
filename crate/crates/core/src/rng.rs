//! Seeded 64-bit linear congruential generator.
//!
//! `state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
//! output is the high 32 bits of the new state. The constants are Knuth's
//! MMIX multiplier and increment, so any implementation can replay a suite
//! from its seed.

use crate::scalar::{rat, Rational};

pub const MULTIPLIER: u64 = 6364136223846793005;
pub const INCREMENT: u64 = 1442695040888963407;

#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        self.state
    }

    pub fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    /// Uniform integer in `lo..=hi` (rejection sampling on the high bits).
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        if span > u32::MAX as u64 {
            return lo + (self.next_u64() % span) as i64;
        }
        let span = span as u32;
        let zone = u32::MAX - (u32::MAX % span);
        loop {
            let x = self.next_u32();
            if x < zone {
                return lo + (x % span) as i64;
            }
        }
    }

    /// Uniform rational `p/q` with `q` in `1..=max_den` and value in `[lo, hi]`.
    pub fn rational(&mut self, lo: i64, hi: i64, max_den: i64) -> Rational {
        let q = self.range(1, max_den);
        let p = self.range(lo * q, hi * q);
        rat(p, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_sequence() {
        let mut g = Lcg::new(0);
        assert_eq!(g.next_u64(), INCREMENT);
        assert_eq!(g.next_u64(), INCREMENT.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT));
    }

    #[test]
    fn range_bounds() {
        let mut g = Lcg::new(7);
        for _ in 0..1000 {
            let x = g.range(-3, 5);
            assert!((-3..=5).contains(&x));
        }
    }
}
