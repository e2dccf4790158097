//! `zeta(D)` for integer `D >= 2` by Euler-Maclaurin summation in exact
//! rationals. The remainder after the last Bernoulli term is bounded by
//! twice the first omitted term, which is conservative for real arguments.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::rational::pow_i;
use crate::scalar::{Interval, Rational};

const HEAD: i64 = 32;
const TERMS: usize = 10;

/// `B_0, B_1, ..., B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::one()];
    for m in 1..=n {
        let mut acc = Rational::zero();
        let mut binom = BigInt::one(); // C(m+1, k)
        for (k, bk) in b.iter().enumerate() {
            acc += bk * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Correction term `k` (1-based): `B_2k / (2k)! * s (s+1) ... (s+2k-2) * N^(-s-2k+1)`.
fn correction(b: &[Rational], s: i64, k: usize) -> Rational {
    let rising = (0..(2 * k - 1) as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(s + j));
    let n = Rational::from_integer(BigInt::from(HEAD));
    &b[2 * k] / Rational::from_integer(factorial(2 * k))
        * Rational::from_integer(rising)
        * pow_i(&n, -(s + 2 * k as i64 - 1))
}

/// Certified enclosure of `zeta(s)`.
pub fn zeta(s: u32) -> Result<Interval> {
    if s < 2 {
        return Err(Error::invalid("zeta needs an argument of at least 2"));
    }
    let s = s as i64;
    let b = bernoulli(2 * TERMS + 2);
    let mut acc = Rational::zero();
    for n in 1..HEAD {
        acc += pow_i(&Rational::from_integer(BigInt::from(n)), -s);
    }
    let n = Rational::from_integer(BigInt::from(HEAD));
    acc += pow_i(&n, 1 - s) / Rational::from_integer(BigInt::from(s - 1));
    acc += pow_i(&n, -s) / Rational::from_integer(BigInt::from(2));
    for k in 1..=TERMS {
        acc += correction(&b, s, k);
    }
    let err = correction(&b, s, TERMS + 1).abs() * Rational::from_integer(BigInt::from(2));
    Ok(Interval::from_bounds(&acc - &err, &acc + &err, 128))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(8);
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
        assert_eq!(b[3], rat(0, 1));
    }

    #[test]
    fn known_values() {
        let z2 = zeta(2).unwrap();
        assert!((z2.to_f64() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
        let z3 = zeta(3).unwrap();
        assert!((z3.to_f64() - 1.2020569031595942).abs() < 1e-15);
        // enclosure tighter than 64 bits
        assert!(z2.width() < Rational::new(BigInt::one(), BigInt::one() << 64u32));
        assert!(zeta(1).is_err());
    }
}
