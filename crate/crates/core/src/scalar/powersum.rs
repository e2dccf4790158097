//! Finite sums `sum_j c_j * m^(e_j)` with `e_j` in `[0, 1)`.
//!
//! These are elements of `Q(m^(1/N))`. Because `x^N - m` is irreducible over
//! the rationals when `m` is not a perfect power, the powers `m^(j/N)` are
//! linearly independent and the normal form below is canonical: a sum is zero
//! exactly when all its coefficients vanish. Signs of nonzero sums are found
//! by interval refinement.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::interval::{Interval, DEFAULT_PRECISION, MAX_PRECISION};
use super::power::PowerScalar;
use super::rational::Rational;
use super::Cmp3;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PowerSum {
    base: u64,
    /// exponent in [0,1) -> nonzero coefficient
    terms: BTreeMap<Rational, Rational>,
}

impl PowerSum {
    pub fn zero() -> Self {
        PowerSum { base: 1, terms: BTreeMap::new() }
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::from_power(&PowerScalar::rational(q))
    }

    pub fn from_power(p: &PowerScalar) -> Self {
        let mut s = Self::zero();
        s.push(p).expect("fresh sum accepts any base");
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Rational::zero()).cloned(),
            _ => None,
        }
    }

    fn push(&mut self, p: &PowerScalar) -> Result<()> {
        if p.is_zero() {
            return Ok(());
        }
        if p.base() != 1 {
            if self.base == 1 {
                self.base = p.base();
            } else if self.base != p.base() {
                return Err(Error::IncompatibleBases(self.base, p.base()));
            }
        }
        let e = p.exponent().clone();
        let entry = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *entry += p.coefficient();
        if entry.is_zero() {
            self.terms.remove(&e);
        }
        Ok(())
    }

    pub fn add_power(&mut self, p: &PowerScalar) -> Result<()> {
        self.push(p)
    }

    pub fn terms(&self) -> impl Iterator<Item = PowerScalar> + '_ {
        self.terms
            .iter()
            .map(move |(e, c)| PowerScalar::new(c.clone(), self.base.max(2), e.clone()).expect("normalized term"))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let mut s = self.clone();
        for t in o.terms() {
            s.push(&t)?;
        }
        Ok(s)
    }

    pub fn neg(&self) -> Self {
        PowerSum { base: self.base, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul_power(&self, p: &PowerScalar) -> Result<Self> {
        let mut s = Self::zero();
        for t in self.terms() {
            s.push(&t.mul(p)?)?;
        }
        Ok(s)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let mut s = Self::zero();
        for a in self.terms() {
            for b in o.terms() {
                s.push(&a.mul(&b)?)?;
            }
        }
        Ok(s)
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        let mut acc = Interval::from_int(0, prec);
        for t in self.terms() {
            acc = acc.add(&t.to_interval(prec + 8));
        }
        Interval::from_bounds(acc.lo, acc.hi, prec)
    }

    /// Sign with precision doubling from the default up to `max_bits`.
    pub fn sign_with_cap(&self, max_bits: u32) -> Cmp3 {
        if self.is_zero() {
            return Cmp3::Equal;
        }
        if let Some(q) = self.as_rational() {
            return Cmp3::from(q.cmp(&Rational::zero()));
        }
        let mut prec = DEFAULT_PRECISION;
        loop {
            match self.to_interval(prec).sign() {
                Cmp3::Uncertain if prec < max_bits => prec = (prec * 2).min(max_bits),
                c => return c,
            }
        }
    }

    pub fn sign(&self) -> Cmp3 {
        self.sign_with_cap(MAX_PRECISION)
    }

    /// Sign as an `Ordering`, or `Undecided` when refinement ran out.
    pub fn signum(&self) -> Result<Ordering> {
        self.sign()
            .ordering()
            .ok_or_else(|| Error::Undecided { what: "sign of an algebraic sum".into(), bits: MAX_PRECISION })
    }

    pub fn cmp(&self, o: &Self) -> Result<Ordering> {
        self.sub(o)?.signum()
    }

    /// Exact floor; the sum is irrational unless it has only a rational term.
    pub fn floor(&self) -> Result<BigInt> {
        if let Some(q) = self.as_rational() {
            return Ok(q.floor().to_integer());
        }
        let mut prec = 64;
        while prec <= 4 * MAX_PRECISION {
            if let Some(k) = self.to_interval(prec).floor_if_determined() {
                return Ok(k);
            }
            prec *= 2;
        }
        Err(Error::Undecided { what: "floor of an algebraic sum".into(), bits: prec })
    }

    pub fn abs_max_coefficient(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl From<&PowerScalar> for PowerSum {
    fn from(p: &PowerScalar) -> Self {
        Self::from_power(p)
    }
}
