//! The diagonal flow `a_t`, shears `h(x)`, the rescalings `b_n`, orbit
//! lattices `a_t h(x) Z^(d+1)` and the two sides of the Dani correspondence:
//! systole traces along the orbit and the weighted approximation profile.
//!
//! Times live on the grid `t = step * ln(lambda)` with rational `step`, so
//! every diagonal entry is an exact [`PowerScalar`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::matrix::QMat;
use crate::lattice::minima::shortest_vector;
use crate::lattice::Lattice;
use crate::scalar::rational::{format_rational, parse_rational_list, pow_i};
use crate::scalar::{int, rat, Interval, LogMonomial, PowerScalar, PowerSum, Rational};

/// `w = (w_1, ..., w_d)` with `sum w_i = 1` and `w_1 >= ... >= w_d > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    w: Vec<Rational>,
    ell: usize,
    xi: Rational,
    delta: Rational,
}

impl WeightVector {
    pub fn new(w: Vec<Rational>) -> Result<Self> {
        let d = w.len();
        if d < 2 {
            return Err(Error::invalid("weight vector needs d >= 2"));
        }
        if w.iter().any(|x| !x.is_positive()) {
            return Err(Error::invalid("weights must be positive"));
        }
        if w.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::invalid("weights must sum to 1"));
        }
        if w.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::invalid("weights must be nonincreasing"));
        }
        let ell = w.iter().take_while(|x| **x == w[0]).count();
        let dq = int(d as i64);
        let lq = int(ell as i64);
        let xi = std::cmp::max(Rational::one(), (&dq - &lq) / &lq);
        let tail: Rational = w[ell..].iter().sum();
        let a = &xi * &w[d - 1];
        let b = &xi * &w[0] - &tail / &lq;
        let delta = std::cmp::min(a, b) / (int(18) * &dq * &dq);
        Ok(WeightVector { w, ell, xi, delta })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_rational_list(s)?)
    }

    /// `(1/d, ..., 1/d)`.
    pub fn equal(d: usize) -> Result<Self> {
        Self::new(vec![rat(1, d as i64); d])
    }

    pub fn d(&self) -> usize {
        self.w.len()
    }

    pub fn w(&self) -> &[Rational] {
        &self.w
    }

    /// Multiplicity of the top weight.
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn xi(&self) -> &Rational {
        &self.xi
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// `w_(l+1) + ... + w_d`.
    pub fn tail_sum(&self) -> Rational {
        self.w[self.ell..].iter().sum()
    }

    /// All weights equal (`l = d`); the tree construction assumes `l < d`.
    pub fn is_equal(&self) -> bool {
        self.ell == self.d()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.w.iter().map(format_rational).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `t = step * ln(lambda)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowTime {
    pub lambda: u64,
    pub step: Rational,
}

impl FlowTime {
    pub fn new(lambda: u64, step: Rational) -> Result<Self> {
        if lambda < 2 {
            return Err(Error::invalid("grid base must be at least 2"));
        }
        Ok(FlowTime { lambda, step })
    }

    /// `e^(c t)` exactly.
    pub fn exp(&self, c: &Rational) -> Result<PowerScalar> {
        PowerScalar::new(Rational::one(), self.lambda, c * &self.step)
    }

    /// `e^(c t)` as a log-monomial.
    pub fn exp_log(&self, c: &Rational) -> LogMonomial {
        LogMonomial::power_of(self.lambda, &(c * &self.step))
    }

    pub fn scaled(&self, k: &Rational) -> FlowTime {
        FlowTime { lambda: self.lambda, step: &self.step * k }
    }

    /// Enclosure of `t` itself.
    pub fn value(&self, prec: u32) -> Interval {
        crate::scalar::interval::ln_rational(&int(self.lambda as i64), prec).scale(&self.step)
    }

    pub fn to_f64(&self) -> f64 {
        crate::scalar::rational::to_f64(&self.step) * (self.lambda as f64).ln()
    }
}

impl fmt::Display for FlowTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*ln({})", format_rational(&self.step), self.lambda)
    }
}

/// Diagonal of `a_t = diag(e^(w_1 t), ..., e^(w_d t), e^(-t))`.
pub fn flow_matrix(w: &WeightVector, t: &FlowTime) -> Result<Vec<PowerScalar>> {
    let mut out = w.w().iter().map(|wi| t.exp(wi)).collect::<Result<Vec<_>>>()?;
    out.push(t.exp(&int(-1))?);
    Ok(out)
}

/// `h(x) = [[I_d, x], [0, 1]]`.
pub fn shear(x: &[Rational]) -> QMat {
    let d = x.len();
    let mut m = crate::lattice::matrix::identity(d + 1);
    for (i, xi) in x.iter().enumerate() {
        m[i][d] = xi.clone();
    }
    m
}

/// Diagonal of `b_n`: `e^(-(W/l) n t)` on the first `l` axes, `e^(w_i n t)`
/// on the rest, and `1` last, where `W = w_(l+1) + ... + w_d`.
pub fn rescale_b(w: &WeightVector, n: u64, t: &FlowTime) -> Result<Vec<PowerScalar>> {
    let nq = int(n as i64);
    let l = w.ell();
    let head = -(w.tail_sum() / int(l as i64)) * &nq;
    let mut out = Vec::with_capacity(w.d() + 1);
    for (i, wi) in w.w().iter().enumerate() {
        out.push(if i < l { t.exp(&head)? } else { t.exp(&(wi * &nq))? });
    }
    out.push(PowerScalar::one());
    Ok(out)
}

/// Product of a diagonal, which is 1 for every matrix above.
pub fn diag_det(g: &[PowerScalar]) -> Result<PowerScalar> {
    g.iter().try_fold(PowerScalar::one(), |acc, x| acc.mul(x))
}

/// `a_t h(x) Z^(d+1)`.
pub fn orbit_lattice(x: &[Rational], w: &WeightVector, t: &FlowTime) -> Result<Lattice> {
    if x.len() != w.d() {
        return Err(Error::invalid("x and w differ in length"));
    }
    Lattice::new(flow_matrix(w, t)?, shear(x))
}

#[derive(Clone, Debug)]
pub struct SystolePoint {
    pub t: FlowTime,
    /// squared length of the shortest nonzero vector
    pub norm_sq: PowerSum,
    /// integer vector `m` with `a_t h(x) m` shortest
    pub witness: Vec<BigInt>,
    /// the shortest vector itself
    pub vector: Vec<PowerScalar>,
}

impl SystolePoint {
    pub fn norm(&self, prec: u32) -> Interval {
        self.norm_sq.to_interval(prec).sqrt()
    }
}

/// Shortest vectors of `a_t h(x) Z^(d+1)` along a list of grid times,
/// computed in parallel and returned in input order.
pub fn systole_trace(x: &[Rational], w: &WeightVector, ts: &[FlowTime]) -> Result<Vec<SystolePoint>> {
    ts.par_iter()
        .map(|t| {
            let lat = orbit_lattice(x, w, t)?;
            let sv = shortest_vector(&lat)?;
            Ok(SystolePoint { t: t.clone(), norm_sq: sv.norm_sq, vector: lat.coords(&sv.frame), witness: sv.coeffs })
        })
        .collect()
}

/// `min_i`-side term `||q x_i||^(1/w_i)` kept as base and exponent.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileValue {
    Zero,
    /// `T * base^exponent`
    Positive {
        horizon: u64,
        base: Rational,
        exponent: Rational,
    },
}

impl ProfileValue {
    pub fn is_zero(&self) -> bool {
        matches!(self, ProfileValue::Zero)
    }

    pub fn to_log(&self) -> Option<LogMonomial> {
        match self {
            ProfileValue::Zero => None,
            ProfileValue::Positive { horizon, base, exponent } => Some(
                LogMonomial::from_int(*horizon)
                    .mul(&LogMonomial::from_rational(base).expect("positive base").pow(exponent)),
            ),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_log().map_or(0.0, |m| m.to_f64())
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, o: &Self) -> Result<Ordering> {
        match (self.to_log(), o.to_log()) {
            (None, None) => Ok(Ordering::Equal),
            (None, Some(_)) => Ok(Ordering::Less),
            (Some(_), None) => Ok(Ordering::Greater),
            (Some(a), Some(b)) => a.cmp_exact(&b),
        }
    }
}

impl fmt::Display for ProfileValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileValue::Zero => write!(f, "0"),
            ProfileValue::Positive { horizon, base, exponent } => {
                write!(f, "{}*({})^({})", horizon, format_rational(base), format_rational(exponent))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProfileEntry {
    pub horizon: u64,
    pub value: ProfileValue,
    pub q: u64,
    pub p: Vec<BigInt>,
}

#[derive(Clone, Debug)]
pub struct ApproximationProfile {
    pub entries: Vec<ProfileEntry>,
    /// `D_w` nonincreasing over the last third and final value below
    /// `threshold * first value`
    pub singular_consistent: bool,
    pub threshold: Rational,
}

/// Nearest integer to `y`, ties toward minus infinity.
pub fn nearest_int(y: &Rational) -> BigInt {
    (y - rat(1, 2)).ceil().to_integer()
}

/// `max_i ||q x_i||^(1/w_i)` as `(||q x_i||, 1/w_i)` of a maximizing axis,
/// together with the nearest integers `p`.
fn term(x: &[Rational], w: &WeightVector, q: u64) -> Result<(Option<(Rational, Rational)>, Vec<BigInt>)> {
    let qq = int(q as i64);
    let mut best: Option<(Rational, Rational)> = None;
    let mut ps = Vec::with_capacity(x.len());
    for (xi, wi) in x.iter().zip(w.w()) {
        let y = xi * &qq;
        let p = nearest_int(&y);
        let dist = (&y - Rational::from_integer(p.clone())).abs();
        ps.push(p);
        if dist.is_zero() {
            continue;
        }
        let e = wi.recip();
        best = Some(match best {
            None => (dist, e),
            Some((b, be)) => {
                if cmp_powers(&dist, &e, &b, &be)? == Ordering::Greater {
                    (dist, e)
                } else {
                    (b, be)
                }
            }
        });
    }
    Ok((best, ps))
}

/// `a^e` vs `b^f` for positive rationals, exactly.
fn cmp_powers(a: &Rational, e: &Rational, b: &Rational, f: &Rational) -> Result<Ordering> {
    let fa = e.to_f64().unwrap_or(0.0) * a.to_f64().unwrap_or(0.0).ln();
    let fb = f.to_f64().unwrap_or(0.0) * b.to_f64().unwrap_or(0.0).ln();
    if (fa - fb).abs() > 1e-9 * (1.0 + fa.abs() + fb.abs()) {
        return Ok(fa.partial_cmp(&fb).unwrap_or(Ordering::Equal));
    }
    // raise both sides to the common denominator
    let den = num_integer::Integer::lcm(e.denom(), f.denom());
    let ea = (e * Rational::from_integer(den.clone())).to_integer().to_i64();
    let fb = (f * Rational::from_integer(den)).to_integer().to_i64();
    match (ea, fb) {
        (Some(x), Some(y)) if x.abs() < 4096 && y.abs() < 4096 => Ok(pow_i(a, x).cmp(&pow_i(b, y))),
        _ => LogMonomial::from_rational(a)?.pow(e).cmp_exact(&LogMonomial::from_rational(b)?.pow(f)),
    }
}

/// `D_w(T) = T * min_{0<q<T} max_i ||q x_i||^(1/w_i)` for each horizon.
/// Among minimizers the smallest `q` is the witness.
pub fn approximation_profile(
    x: &[Rational],
    w: &WeightVector,
    horizons: &[u64],
    threshold: &Rational,
) -> Result<ApproximationProfile> {
    if x.len() != w.d() {
        return Err(Error::invalid("x and w differ in length"));
    }
    if horizons.windows(2).any(|p| p[0] >= p[1]) || horizons.first().is_some_and(|&t| t < 2) {
        return Err(Error::invalid("horizons must be increasing and at least 2"));
    }
    let mut entries = Vec::with_capacity(horizons.len());
    // running minimum over q < current horizon
    let mut best: Option<(Option<(Rational, Rational)>, u64, Vec<BigInt>)> = None;
    let mut q = 1u64;
    for &big_t in horizons {
        while q < big_t {
            let (v, p) = term(x, w, q)?;
            let better = match &best {
                None => true,
                Some((bv, _, _)) => match (bv, &v) {
                    (None, _) => false,
                    (Some(_), None) => true,
                    (Some((a, e)), Some((b, f))) => cmp_powers(b, f, a, e)? == Ordering::Less,
                },
            };
            if better {
                best = Some((v, q, p));
            }
            q += 1;
        }
        let (v, bq, bp) = best.clone().expect("horizon >= 2 scans q = 1");
        let value = match v {
            None => ProfileValue::Zero,
            Some((base, exponent)) => ProfileValue::Positive { horizon: big_t, base, exponent },
        };
        entries.push(ProfileEntry { horizon: big_t, value, q: bq, p: bp });
    }
    let singular_consistent = singular_flag(&entries, threshold)?;
    Ok(ApproximationProfile { entries, singular_consistent, threshold: threshold.clone() })
}

fn singular_flag(entries: &[ProfileEntry], threshold: &Rational) -> Result<bool> {
    let n = entries.len();
    if n < 2 {
        return Ok(false);
    }
    let tail = &entries[(2 * n) / 3..];
    for pair in tail.windows(2) {
        if pair[1].value.cmp_exact(&pair[0].value)? == Ordering::Greater {
            return Ok(false);
        }
    }
    let last = &entries[n - 1].value;
    let Some(first) = entries[0].value.to_log() else {
        return Ok(last.is_zero());
    };
    match last.to_log() {
        None => Ok(true),
        Some(l) => Ok(l.cmp_exact(&first.mul(&LogMonomial::from_rational(threshold)?))? == Ordering::Less),
    }
}

/// Continued fraction partial quotients of a rational.
pub fn continued_fraction(x: &Rational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut a, mut b) = (x.numer().clone(), x.denom().clone());
    while !b.is_zero() {
        let q = num_integer::Integer::div_floor(&a, &b);
        let r = &a - &q * &b;
        out.push(q);
        a = b;
        b = r;
    }
    out
}

/// Convergent denominators `q_0, q_1, ...` of a rational.
pub fn convergent_denominators(x: &Rational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut q0, mut q1) = (BigInt::one(), BigInt::zero());
    for a in continued_fraction(x) {
        let q2 = &a * &q1 + &q0;
        q0 = q1;
        q1 = q2.clone();
        out.push(q2);
    }
    out
}
