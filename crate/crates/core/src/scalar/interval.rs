//! Outward-rounded intervals with dyadic endpoints.
//!
//! Endpoints are rationals of the form `m * 2^e` with at most `precision_bits`
//! significant bits in `m`. Every operation rounds the lower end down and the
//! upper end up, so the true value of any expression built from exact inputs
//! stays inside the result.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{rat, Rational};
use super::Cmp3;

pub const DEFAULT_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub precision_bits: u32,
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

fn shifted(m: BigInt, e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(m << (e as u64))
    } else {
        Rational::new(m, pow2(e.unsigned_abs()))
    }
}

/// Largest dyadic with `prec` significant bits that is `<= x`.
pub fn round_down(x: &Rational, prec: u32) -> Rational {
    round_dir(x, prec, false)
}

/// Smallest dyadic with `prec` significant bits that is `>= x`.
pub fn round_up(x: &Rational, prec: u32) -> Rational {
    round_dir(x, prec, true)
}

fn round_dir(x: &Rational, prec: u32, up: bool) -> Rational {
    if x.is_zero() {
        return x.clone();
    }
    let n = x.numer();
    let d = x.denom();
    // already short enough: keep exact
    if d.bits() <= 1 || (d & (d - BigInt::one())).is_zero() {
        if n.bits() <= prec as u64 {
            return x.clone();
        }
    }
    let e = n.bits() as i64 - d.bits() as i64 - prec as i64;
    // scaled = x * 2^-e
    let (num, den) = if e <= 0 { (n << e.unsigned_abs(), d.clone()) } else { (n.clone(), d << (e as u64)) };
    let m = if up { num.div_ceil(&den) } else { num.div_floor(&den) };
    shifted(m, e)
}

impl Interval {
    pub fn point(x: &Rational, prec: u32) -> Self {
        Interval { lo: round_down(x, prec), hi: round_up(x, prec), precision_bits: prec }
    }

    pub fn from_bounds(lo: Rational, hi: Rational, prec: u32) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Interval { lo: round_down(&lo, prec), hi: round_up(&hi, prec), precision_bits: prec }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Self::point(&Rational::from_integer(BigInt::from(n)), prec)
    }

    fn prec_with(&self, o: &Interval) -> u32 {
        self.precision_bits.max(o.precision_bits)
    }

    fn make(lo: Rational, hi: Rational, prec: u32) -> Self {
        Interval { lo: round_down(&lo, prec), hi: round_up(&hi, prec), precision_bits: prec }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / rat(2, 1)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        super::rational::to_f64(&self.mid())
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Self::make(&self.lo + &o.lo, &self.hi + &o.hi, self.prec_with(o))
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Self::make(&self.lo - &o.hi, &self.hi - &o.lo, self.prec_with(o))
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo, precision_bits: self.precision_bits }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Self::make(lo, hi, self.prec_with(o))
    }

    pub fn scale(&self, q: &Rational) -> Interval {
        self.mul(&Interval::point(q, self.precision_bits))
    }

    /// `None` when the divisor straddles zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        let p = self.prec_with(o);
        let inv = Self::make(o.hi.recip(), o.lo.recip(), p);
        Some(self.mul(&inv))
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let hi = (-&self.lo).max(self.hi.clone());
            Interval { lo: Rational::zero(), hi, precision_bits: self.precision_bits }
        }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            precision_bits: self.prec_with(o),
        }
    }

    pub fn powi(&self, k: u32) -> Interval {
        let mut acc = Interval::from_int(1, self.precision_bits);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Square root; negative parts of the input are clipped to zero.
    pub fn sqrt(&self) -> Interval {
        let p = self.precision_bits;
        let lo = if self.lo.is_positive() { root_bound(&self.lo, 2, p, false) } else { Rational::zero() };
        let hi = if self.hi.is_positive() { root_bound(&self.hi, 2, p, true) } else { Rational::zero() };
        Interval { lo, hi, precision_bits: p }
    }

    /// Enclosure of `exp` over the interval.
    pub fn exp(&self) -> Interval {
        let p = self.precision_bits;
        let lo = exp_rational(&self.lo, p).lo;
        let hi = exp_rational(&self.hi, p).hi;
        Interval { lo, hi, precision_bits: p }
    }

    /// Enclosure of `ln`; `None` unless the interval is strictly positive.
    pub fn ln(&self) -> Option<Interval> {
        if !self.lo.is_positive() {
            return None;
        }
        let p = self.precision_bits;
        Some(Interval { lo: ln_rational(&self.lo, p).lo, hi: ln_rational(&self.hi, p).hi, precision_bits: p })
    }

    pub fn compare(&self, o: &Interval) -> Cmp3 {
        if self.hi < o.lo {
            Cmp3::Less
        } else if self.lo > o.hi {
            Cmp3::Greater
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Cmp3::Equal
        } else {
            Cmp3::Uncertain
        }
    }

    pub fn sign(&self) -> Cmp3 {
        if self.lo.is_positive() {
            Cmp3::Greater
        } else if self.hi.is_negative() {
            Cmp3::Less
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Cmp3::Equal
        } else {
            Cmp3::Uncertain
        }
    }

    /// `Some(k)` when every point of the interval has floor `k`.
    pub fn floor_if_determined(&self) -> Option<BigInt> {
        let a = self.lo.floor().to_integer();
        let b = self.hi.floor().to_integer();
        (a == b).then_some(a)
    }
}

/// Bound on `x^(1/q)` for positive rational `x`, rounded to `prec` bits.
pub fn root_bound(x: &Rational, q: u32, prec: u32, up: bool) -> Rational {
    assert!(x.is_positive());
    if q == 1 {
        return if up { round_up(x, prec) } else { round_down(x, prec) };
    }
    // pick K so the root carries about prec+4 significant bits
    let mag = (x.numer().bits() as i64 - x.denom().bits() as i64) / q as i64;
    let k = prec as i64 + 8 - mag;
    // y = x * 2^(qK); root(y) / 2^K
    let qk = k * q as i64;
    let (num, den) = if qk >= 0 {
        (x.numer() << (qk as u64), x.denom().clone())
    } else {
        (x.numer().clone(), x.denom() << qk.unsigned_abs())
    };
    let y = if up { num.div_ceil(&den) } else { num.div_floor(&den) };
    let yu = y.to_biguint().expect("positive");
    let mut r: BigUint = yu.nth_root(q);
    if up && num_traits::pow(r.clone(), q as usize) != yu {
        r += 1u32;
    }
    let r = BigInt::from_biguint(Sign::Plus, r);
    let v = shifted(r, -k);
    if up {
        round_up(&v, prec)
    } else {
        round_down(&v, prec)
    }
}

/// Enclosure of `exp(a)` for rational `a`.
pub fn exp_rational(a: &Rational, prec: u32) -> Interval {
    if a.is_zero() {
        return Interval::from_int(1, prec);
    }
    // reduce |a / 2^m| <= 1/4
    let mag = a.numer().bits() as i64 - a.denom().bits() as i64;
    let m = (mag + 3).max(0) as u64;
    let wp = prec + m as u32 + 16;
    let y = a / Rational::from_integer(pow2(m));
    let yi = Interval::point(&y, wp);
    let mut sum = Interval::from_int(1, wp);
    let mut term = Interval::from_int(1, wp);
    let tol = Rational::new(BigInt::one(), pow2(wp as u64 + 2));
    let mut k = 1i64;
    loop {
        term = term.mul(&yi).scale(&rat(1, k));
        sum = sum.add(&term);
        // remaining tail bounded by 2|term|·|y| since |y| <= 1/4
        let tmax = term.abs().hi;
        if tmax < tol || k > 4 * wp as i64 {
            let tail = &tmax * rat(1, 2);
            sum = Interval::make(&sum.lo - &tail, &sum.hi + &tail, wp);
            break;
        }
        k += 1;
    }
    for _ in 0..m {
        sum = sum.mul(&sum);
    }
    Interval::make(sum.lo, sum.hi, prec)
}

fn atanh_series(z: &Rational, wp: u32) -> Interval {
    // sum z^(2j+1)/(2j+1), |z| <= 1/3
    let zi = Interval::point(z, wp);
    let z2 = zi.mul(&zi);
    let mut pw = zi.clone();
    let mut sum = zi.clone();
    let tol = Rational::new(BigInt::one(), pow2(wp as u64 + 2));
    let mut j = 1i64;
    loop {
        pw = pw.mul(&z2);
        let t = pw.scale(&rat(1, 2 * j + 1));
        sum = sum.add(&t);
        let tmax = t.abs().hi;
        if tmax < tol || j > 4 * wp as i64 {
            // geometric tail with ratio z^2 <= 1/9
            let tail = tmax * rat(1, 8);
            sum = Interval::make(&sum.lo - &tail, &sum.hi + &tail, wp);
            break;
        }
        j += 1;
    }
    sum
}

pub fn ln2(prec: u32) -> Interval {
    let wp = prec + 16;
    let a = atanh_series(&rat(1, 3), wp);
    let two = Interval::from_int(2, wp);
    let r = a.mul(&two);
    Interval::make(r.lo, r.hi, prec)
}

/// Enclosure of `ln(x)` for positive rational `x`.
pub fn ln_rational(x: &Rational, prec: u32) -> Interval {
    assert!(x.is_positive(), "ln of non-positive value");
    if x.is_one() {
        return Interval::from_int(0, prec);
    }
    // x = 2^k * y with y in [2/3, 4/3]
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut y = x / shifted(BigInt::one(), k);
    while y > rat(4, 3) {
        y /= rat(2, 1);
        k += 1;
    }
    while y < rat(2, 3) {
        y *= rat(2, 1);
        k -= 1;
    }
    let kb = (k.unsigned_abs().max(1) as f64).log2().ceil() as u32;
    let wp = prec + 16 + kb;
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let ly = atanh_series(&z, wp).mul(&Interval::from_int(2, wp));
    let total = ly.add(&ln2(wp).mul(&Interval::from_int(k, wp)));
    Interval::make(total.lo, total.hi, prec)
}

impl PartialOrd for Interval {
    /// Partial order: `Some` only when the enclosures are disjoint or identical points.
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.compare(o) {
            Cmp3::Less => Some(Ordering::Less),
            Cmp3::Greater => Some(Ordering::Greater),
            Cmp3::Equal => Some(Ordering::Equal),
            Cmp3::Uncertain => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    /// Bisection oracle for sqrt(2): keeps [a, b] with a^2 <= 2 <= b^2.
    fn bisect_sqrt2(steps: u32) -> (Rational, Rational) {
        let (mut a, mut b) = (rat(1, 1), rat(2, 1));
        for _ in 0..steps {
            let m = (&a + &b) / rat(2, 1);
            if &m * &m <= rat(2, 1) {
                a = m
            } else {
                b = m
            }
        }
        (a, b)
    }

    #[test]
    fn sqrt2_at_64_bits() {
        let iv = Interval::from_int(2, 64).sqrt();
        let (a, b) = bisect_sqrt2(90);
        assert!(iv.lo <= a && b <= iv.hi, "enclosure must contain the bisection bracket");
        let bound = Rational::new(BigInt::one(), pow2(60)) * &b;
        assert!(iv.width() < bound);
    }

    #[test]
    fn overlap_is_uncertain() {
        let a = Interval::from_bounds(r("1.41"), r("1.42"), 64);
        let b = Interval::from_bounds(r("1.415"), r("1.43"), 64);
        assert_eq!(a.compare(&b), Cmp3::Uncertain);
        let c = Interval::from_bounds(r("1.5"), r("1.6"), 64);
        assert_eq!(a.compare(&c), Cmp3::Less);
        assert_eq!(c.compare(&a), Cmp3::Greater);
    }

    #[test]
    fn rounding_directions() {
        let x = rat(1, 3);
        let lo = round_down(&x, 10);
        let hi = round_up(&x, 10);
        assert!(lo < x && x < hi);
        assert!(&hi - &lo <= Rational::new(BigInt::one(), pow2(10)));
        assert_eq!(round_down(&rat(3, 4), 10), rat(3, 4));
    }

    #[test]
    fn ln2_and_exp_bracket_known_digits() {
        // ln 2 = 0.693147180559945309417232121458...
        let l = ln2(128);
        assert!(l.lo > r("0.69314718055994530941723212145") && l.hi < r("0.69314718055994530941723212146"));
        assert!(l.width() < r("1e-35"));
        // e = 2.718281828459045235360287471352...
        let e = exp_rational(&rat(1, 1), 128);
        assert!(e.lo > r("2.71828182845904523536028747135") && e.hi < r("2.71828182845904523536028747136"));
        let back = ln_rational(&rat(10, 1), 128).exp();
        assert!(back.contains(&rat(10, 1)));
        let neg = exp_rational(&rat(-37, 2), 96);
        assert!(neg.lo.is_positive());
        assert!(neg.mul(&exp_rational(&rat(37, 2), 96)).contains(&rat(1, 1)));
    }

    #[test]
    fn ln_is_additive() {
        let a = ln_rational(&rat(6, 1), 100);
        let b = ln_rational(&rat(2, 1), 100).add(&ln_rational(&rat(3, 1), 100));
        assert_eq!(a.compare(&b), Cmp3::Uncertain);
        assert!(a.width() < r("1e-28"));
    }

    #[test]
    fn cube_root_bounds() {
        let lo = root_bound(&rat(27, 8), 3, 64, false);
        let hi = root_bound(&rat(27, 8), 3, 64, true);
        assert!(lo <= rat(3, 2) && rat(3, 2) <= hi);
        let lo = root_bound(&rat(2, 1), 3, 64, false);
        let hi = root_bound(&rat(2, 1), 3, 64, true);
        assert!(&lo * &lo * &lo <= rat(2, 1) && rat(2, 1) <= &hi * &hi * &hi);
    }
}
