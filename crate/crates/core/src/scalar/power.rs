//! Exact values of the form `coefficient * m^e`.
//!
//! The radical base is normalized so that `m` is not a perfect power and the
//! exponent lies in `[0, 1)`; whole powers of `m` are folded into the
//! coefficient. With this normal form `exponent == 0` means the value is
//! rational, and two values are equal exactly when their fields are equal.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{root_bound, Interval};
use super::rational::{format_rational, int, parse_rational, perfect_power_root, pow_i, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerScalar {
    coefficient: Rational,
    /// Normalized radical base; `1` when the value is rational.
    base: u64,
    exponent: Rational,
}

impl PowerScalar {
    pub fn new(coefficient: Rational, lambda: u64, exponent: Rational) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::invalid("power base must be positive"));
        }
        if coefficient.is_zero() || lambda == 1 || exponent.is_zero() {
            return Ok(Self::rational(coefficient));
        }
        let (m, k) = perfect_power_root(lambda);
        let e = exponent * int(k as i64);
        let whole = e.floor();
        let frac = &e - &whole;
        let wi = whole
            .to_integer()
            .to_i64()
            .filter(|w| w.abs() < 1 << 20)
            .ok_or_else(|| Error::invalid("power exponent too large"))?;
        let coefficient = coefficient * pow_i(&int(m as i64), wi);
        if frac.is_zero() {
            Ok(Self::rational(coefficient))
        } else {
            Ok(PowerScalar { coefficient, base: m, exponent: frac })
        }
    }

    pub fn rational(q: Rational) -> Self {
        PowerScalar { coefficient: q, base: 1, exponent: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn coefficient(&self) -> &Rational {
        &self.coefficient
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn exponent(&self) -> &Rational {
        &self.exponent
    }

    pub fn is_exact(&self) -> bool {
        self.exponent.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        self.coefficient.cmp(&Rational::zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.coefficient)
    }

    /// Exact evaluation; fails for irrational values.
    pub fn eval_exact(&self) -> Result<Rational> {
        self.as_rational().cloned().ok_or_else(|| Error::ExactnessUnavailable(format!("{self} is irrational")))
    }

    /// Enclosure with relative width below `2^(4 - prec)`.
    pub fn to_interval(&self, prec: u32) -> Interval {
        if self.is_exact() {
            return Interval::point(&self.coefficient, prec);
        }
        let p = self.exponent.numer().to_u32().expect("exponent numerator");
        let q = self.exponent.denom().to_u32().expect("exponent denominator");
        let mp = Rational::from_integer(num_traits::pow(BigInt::from(self.base), p as usize));
        let wp = prec + 4;
        let root = Interval { lo: root_bound(&mp, q, wp, false), hi: root_bound(&mp, q, wp, true), precision_bits: wp };
        let r = root.mul(&Interval::point(&self.coefficient, wp));
        Interval::from_bounds(r.lo, r.hi, prec)
    }

    pub fn neg(&self) -> Self {
        PowerScalar { coefficient: -&self.coefficient, ..self.clone() }
    }

    pub fn abs(&self) -> Self {
        PowerScalar { coefficient: self.coefficient.abs(), ..self.clone() }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        PowerScalar { coefficient: &self.coefficient * q, ..self.clone() }
    }

    fn common_base(&self, o: &Self) -> Result<u64> {
        match (self.base, o.base) {
            (1, b) | (b, 1) => Ok(b),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(Error::IncompatibleBases(a, b)),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero());
        }
        let b = self.common_base(o)?;
        Self::new(&self.coefficient * &o.coefficient, b.max(1), &self.exponent + &o.exponent)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::invalid("reciprocal of zero"));
        }
        Self::new(self.coefficient.recip(), self.base, -self.exponent.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.recip()?)
    }

    pub fn powi(&self, k: i64) -> Result<Self> {
        if self.is_zero() {
            return if k > 0 { Ok(Self::zero()) } else { Err(Error::invalid("zero to a non-positive power")) };
        }
        Self::new(pow_i(&self.coefficient, k), self.base, &self.exponent * int(k))
    }

    /// Exact total order; works across different radical bases by raising
    /// both sides to the common exponent denominator.
    pub fn cmp_exact(&self, o: &Self) -> Ordering {
        let sa = self.signum();
        let sb = o.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == Ordering::Equal {
            return Ordering::Equal;
        }
        if self.is_exact() && o.is_exact() {
            return self.coefficient.cmp(&o.coefficient);
        }
        // cheap attempt first
        let ia = self.to_interval(64);
        let ib = o.to_interval(64);
        if ia.hi < ib.lo {
            return Ordering::Less;
        }
        if ia.lo > ib.hi {
            return Ordering::Greater;
        }
        let n = self.exponent.denom().lcm(o.exponent.denom());
        let n = n.to_usize().expect("exponent denominator");
        let pa = Self::raised_abs(self, n);
        let pb = Self::raised_abs(o, n);
        let ord = pa.cmp(&pb);
        if sa == Ordering::Less {
            ord.reverse()
        } else {
            ord
        }
    }

    fn raised_abs(x: &Self, n: usize) -> Rational {
        let c = num_traits::pow(x.coefficient.abs(), n);
        let e = (&x.exponent * int(n as i64)).to_integer();
        let e = e.to_usize().expect("integral exponent");
        c * Rational::from_integer(num_traits::pow(BigInt::from(x.base), e))
    }

    pub fn max<'a>(&'a self, o: &'a Self) -> &'a Self {
        if self.cmp_exact(o) == Ordering::Less {
            o
        } else {
            self
        }
    }

    pub fn min<'a>(&'a self, o: &'a Self) -> &'a Self {
        if self.cmp_exact(o) == Ordering::Greater {
            o
        } else {
            self
        }
    }

    /// Exact floor of `self + shift`. Terminates because an irrational value
    /// is never an integer.
    pub fn floor_shifted(&self, shift: &Rational) -> BigInt {
        if self.is_exact() {
            return (&self.coefficient + shift).floor().to_integer();
        }
        let mut prec = 64;
        loop {
            let iv = self.to_interval(prec).add(&Interval::point(shift, prec));
            if let Some(k) = iv.floor_if_determined() {
                return k;
            }
            prec *= 2;
        }
    }

    /// Exact ceiling of `self + shift`.
    pub fn ceil_shifted(&self, shift: &Rational) -> BigInt {
        -self.neg().floor_shifted(&-shift.clone())
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (coef, pow) = match s.split_once('*') {
            Some((c, p)) => (parse_rational(c)?, Some(p)),
            None if s.contains('^') => (Rational::one(), Some(s)),
            None => (parse_rational(s)?, None),
        };
        let Some(pow) = pow else {
            return Ok(Self::rational(coef));
        };
        let (b, e) = pow.split_once('^').ok_or_else(|| Error::Parse(format!("expected base^exponent in {s:?}")))?;
        let b: u64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad power base in {s:?}")))?;
        if b < 2 {
            return Err(Error::Parse(format!("power base must be at least 2 in {s:?}")));
        }
        let e = parse_rational(e)?;
        if e.abs() > int(1 << 16) {
            return Err(Error::Parse(format!("power exponent too large in {s:?}")));
        }
        Self::new(coef, b, e).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for PowerScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", format_rational(&self.coefficient))
        } else {
            write!(f, "{}*{}^{}", format_rational(&self.coefficient), self.base, format_rational(&self.exponent))
        }
    }
}

impl From<Rational> for PowerScalar {
    fn from(q: Rational) -> Self {
        Self::rational(q)
    }
}
