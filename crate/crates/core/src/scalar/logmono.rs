//! Positive reals `exp(b) * prod p^(e_p)` with rational `b` and `e_p`.
//!
//! Used for the construction sequences, whose factors (`sqrt(d)`, `e^(t0)`,
//! `epsilon / n`, powers of the grid base) do not share one radical base.
//! Logarithms of such values are rational combinations of `1` and `ln p`,
//! which are linearly independent over the rationals, so equal values have
//! equal normal forms and distinct values are separated by refinement.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{exp_rational, ln_rational, Interval, DEFAULT_PRECISION, MAX_PRECISION};
use super::rational::{format_rational, int, Rational};
use super::Cmp3;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LogMonomial {
    /// exponent of e
    e_power: Rational,
    /// factor atom -> exponent; atoms are primes, except possibly a large
    /// cofactor left over by trial division
    atoms: BTreeMap<BigUint, Rational>,
}

const TRIAL_LIMIT: u64 = 1 << 20;

/// `ln p` enclosures are reused across comparisons.
fn ln_atom(p: &BigUint, prec: u32) -> Interval {
    static CACHE: OnceLock<Mutex<HashMap<(BigUint, u32), Interval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache lock").get(&(p.clone(), prec)) {
        return v.clone();
    }
    let v = ln_rational(&Rational::from_integer(p.clone().into()), prec);
    cache.lock().expect("cache lock").insert((p.clone(), prec), v.clone());
    v
}

fn factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut k = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            k += 1;
        }
        if k > 0 {
            out.push((bp, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

impl LogMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_rational(q: &Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::invalid("log-monomials are positive"));
        }
        let mut m = Self::one();
        for (p, k) in factor(&q.numer().to_biguint().unwrap()) {
            m.add_atom(p, int(k as i64));
        }
        for (p, k) in factor(&q.denom().to_biguint().unwrap()) {
            m.add_atom(p, int(-(k as i64)));
        }
        Ok(m)
    }

    pub fn from_int(n: u64) -> Self {
        Self::from_rational(&int(n as i64)).expect("positive")
    }

    /// `e^b`.
    pub fn exp(b: Rational) -> Self {
        LogMonomial { e_power: b, atoms: BTreeMap::new() }
    }

    /// `lambda^x`.
    pub fn power_of(lambda: u64, x: &Rational) -> Self {
        Self::from_int(lambda).pow(x)
    }

    fn add_atom(&mut self, p: BigUint, k: Rational) {
        let e = self.atoms.entry(p.clone()).or_insert_with(Rational::zero);
        *e += k;
        if e.is_zero() {
            self.atoms.remove(&p);
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.e_power += &o.e_power;
        for (p, k) in &o.atoms {
            r.add_atom(p.clone(), k.clone());
        }
        r
    }

    pub fn recip(&self) -> Self {
        self.pow(&int(-1))
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn pow(&self, x: &Rational) -> Self {
        if x.is_zero() {
            return Self::one();
        }
        LogMonomial { e_power: &self.e_power * x, atoms: self.atoms.iter().map(|(p, k)| (p.clone(), k * x)).collect() }
    }

    /// Exact value when it is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        if !self.e_power.is_zero() {
            return None;
        }
        let mut acc = Rational::one();
        for (p, k) in &self.atoms {
            if !k.is_integer() {
                return None;
            }
            let k = k.to_integer().to_i64()?;
            let base = Rational::from_integer(p.clone().into());
            acc *= super::rational::pow_i(&base, k);
        }
        Some(acc)
    }

    /// Enclosure of the natural logarithm.
    pub fn ln(&self, prec: u32) -> Interval {
        let wp = prec + 8 + self.atoms.len() as u32;
        let mut acc = Interval::point(&self.e_power, wp);
        for (p, k) in &self.atoms {
            acc = acc.add(&ln_atom(p, wp).scale(k));
        }
        Interval::from_bounds(acc.lo, acc.hi, prec)
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(&q, prec);
        }
        let l = self.ln(prec + 16);
        Interval { lo: exp_rational(&l.lo, prec).lo, hi: exp_rational(&l.hi, prec).hi, precision_bits: prec }
    }

    pub fn to_f64(&self) -> f64 {
        self.ln(64).to_f64().exp()
    }

    /// Total order. Equal normal forms mean equal values; otherwise the
    /// logarithm difference is nonzero and refinement settles it.
    pub fn cmp3(&self, o: &Self) -> Cmp3 {
        if self == o {
            return Cmp3::Equal;
        }
        let q = self.div(o);
        let mut prec = DEFAULT_PRECISION / 2;
        loop {
            match q.ln(prec).sign() {
                Cmp3::Uncertain if prec < MAX_PRECISION => prec *= 2,
                c => return c,
            }
        }
    }

    pub fn cmp_exact(&self, o: &Self) -> Result<Ordering> {
        self.cmp3(o).ordering().ok_or_else(|| Error::Undecided { what: format!("{self} vs {o}"), bits: MAX_PRECISION })
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.atoms.iter()
    }

    pub fn e_power(&self) -> &Rational {
        &self.e_power
    }

    /// Greatest index among the atoms, used to sanity check the normal form.
    pub fn largest_atom(&self) -> Option<u64> {
        self.atoms.keys().last().and_then(|p| p.to_u64())
    }

    pub fn gcd_free(&self) -> bool {
        let keys: Vec<_> = self.atoms.keys().collect();
        keys.windows(2).all(|w| w[0].gcd(w[1]).is_one())
    }
}

impl fmt::Display for LogMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.e_power.is_zero() {
            parts.push(format!("e^{}", format_rational(&self.e_power)));
        }
        for (p, k) in &self.atoms {
            parts.push(format!("{p}^{}", format_rational(k)));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}
