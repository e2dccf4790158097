//! Self-affine structure calculus and the tree of rational vectors.
//!
//! [`ConstructionParams`] fixes the weight, `eps`, the grid time `t`, the
//! radius `r` and the offset `t_0`. Everything downstream is a function of
//! `eps_n = eps / n` and `t_n = t_0 + xi t n (n+1) / 2`:
//!
//! * `C_n = eps_n^d e^(xi d n t)`
//! * `L_n^(i) = 2 eps_n e^(-w_i t_(n+1) - t_n)`
//! * `rho_n = c' r^(d-1) / (4 sqrt(d) eps_(n-1)) e^((W/l - xi) n t)`
//!
//! with `W = w_(l+1) + ... + w_d`. Level zero uses `C_0 = 1`,
//! `L_0^(i) = 2 e^(-w_i t_1)` (the root rectangle) and `eps_0 = eps`.

pub mod tree;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::counting::LemmaConstants;
use crate::error::{Error, Result};
use crate::flow::{FlowTime, WeightVector};
use crate::lattice::matrix::identity;
use crate::lattice::minima::{euclidean_minima_sq, nonzero_points, shortest_vector};
use crate::lattice::{wedge_norm, Enumerator, Lattice, WeightedBox};
use crate::report::Record;
use crate::rng::Lcg;
use crate::scalar::{format_rational, int, rat, Interval, LogMonomial, PowerScalar, Rational};

pub use tree::{
    assign_measure, box_dimension_proxy, child_candidates, child_count_rows, condition_check, condition_check_wedge,
    cover_count, expand_tree, separation_check, tree_report, Candidate, CandidateOracle, ConditionRecord, FractalTree,
    Rectangle, SeparationReport, TreeNode,
};

/// `d - 1/(1 + w_1)`.
pub fn dimension_lower_bound(w: &WeightVector) -> Rational {
    int(w.d() as i64) - (int(1) + &w.w()[0]).recip()
}

/// Wedge constant used in `rho_n`. In dimension 3 the cross product of two
/// lattice vectors is a nonzero dual vector, so `||v ^ w|| >= r` on `K*_r`;
/// [`measure_c_prime`] reproduces this on random lattices.
pub const MEASURED_C_PRIME: i64 = 1;

/// `t_0 = e + grid * ln(lambda)`. Only `e = 0` gives exact rectangles.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeOffset {
    pub e: Rational,
    pub grid: Rational,
}

impl TimeOffset {
    pub fn grid(step: Rational) -> Self {
        TimeOffset { e: Rational::zero(), grid: step }
    }

    pub fn is_grid(&self) -> bool {
        self.e.is_zero()
    }
}

impl fmt::Display for TimeOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.e.is_zero(), self.grid.is_zero()) {
            (true, true) => write!(f, "0"),
            (true, false) => write!(f, "{}*ln(lambda)", format_rational(&self.grid)),
            (false, true) => write!(f, "{}", format_rational(&self.e)),
            (false, false) => write!(f, "{}+{}*ln(lambda)", format_rational(&self.e), format_rational(&self.grid)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionParams {
    pub w: WeightVector,
    pub eps: Rational,
    pub t: FlowTime,
    pub r: Rational,
    pub t0: TimeOffset,
    pub c_prime: Rational,
    pub consts: LemmaConstants,
}

impl ConstructionParams {
    pub fn new(w: WeightVector, eps: Rational, t: FlowTime, r: Rational, t0: TimeOffset) -> Result<Self> {
        if !eps.is_positive() || !r.is_positive() {
            return Err(Error::invalid("eps and r must be positive"));
        }
        if !t.step.is_positive() {
            return Err(Error::invalid("t must be positive"));
        }
        Ok(ConstructionParams { w, eps, t, r, t0, c_prime: int(MEASURED_C_PRIME), consts: LemmaConstants::default() })
    }

    /// `w = (2/3, 1/3)`, `t = 3 ln 2`, `eps = 1/2`, `r = 1/4`, `t_0 = 1`.
    pub fn desk_default() -> Self {
        let w = WeightVector::new(vec![rat(2, 3), rat(1, 3)]).expect("valid weights");
        let t = FlowTime::new(2, int(3)).expect("valid time");
        Self::new(w, rat(1, 2), t, rat(1, 4), TimeOffset { e: int(1), grid: int(0) }).expect("valid params")
    }

    pub fn d(&self) -> usize {
        self.w.d()
    }

    pub fn eps_n(&self, n: u64) -> Rational {
        if n == 0 {
            self.eps.clone()
        } else {
            &self.eps / int(n as i64)
        }
    }

    fn tri(&self, n: u64) -> Rational {
        self.w.xi() * rat((n * (n + 1) / 2) as i64, 1)
    }

    /// `t_n / ln(lambda)` for grid offsets.
    pub fn grid_tn(&self, n: u64) -> Result<Rational> {
        if !self.t0.is_grid() {
            return Err(Error::GridViolation(format!("t_0 = {} is not on the grid", self.t0)));
        }
        Ok(&self.t0.grid + &self.t.step * self.tri(n))
    }

    /// `e^(c t_n)`.
    pub fn exp_tn(&self, n: u64, c: &Rational) -> LogMonomial {
        let grid = &self.t0.grid + &self.t.step * self.tri(n);
        LogMonomial::exp(c * &self.t0.e).mul(&LogMonomial::power_of(self.t.lambda, &(c * grid)))
    }

    /// `e^(c t)`.
    pub fn exp_t(&self, c: &Rational) -> LogMonomial {
        LogMonomial::power_of(self.t.lambda, &(c * &self.t.step))
    }

    /// `e^(c t_n)` as an exact power of `lambda`.
    pub fn power_tn(&self, n: u64, c: &Rational) -> Result<PowerScalar> {
        PowerScalar::new(Rational::one(), self.t.lambda, c * self.grid_tn(n)?)
    }

    fn lm(q: &Rational) -> LogMonomial {
        LogMonomial::from_rational(q).expect("positive")
    }

    pub fn c_n(&self, n: u64) -> LogMonomial {
        if n == 0 {
            return LogMonomial::one();
        }
        let d = self.d() as i64;
        Self::lm(&self.eps_n(n)).pow(&int(d)).mul(&self.exp_t(&(self.w.xi() * int(d * n as i64))))
    }

    /// `L_n^(i)` with `i` zero-based.
    pub fn l_n(&self, n: u64, i: usize) -> LogMonomial {
        let wi = &self.w.w()[i];
        if n == 0 {
            return LogMonomial::from_int(2).mul(&self.exp_tn(1, &-wi.clone()));
        }
        Self::lm(&(int(2) * self.eps_n(n))).mul(&self.exp_tn(n + 1, &-wi.clone())).mul(&self.exp_tn(n, &int(-1)))
    }

    pub fn rho_n(&self, n: u64) -> LogMonomial {
        let d = self.d() as i64;
        let l = self.w.ell() as i64;
        let head =
            &self.c_prime * crate::scalar::rational::pow_i(&self.r, d - 1) / (int(4) * self.eps_n(n.saturating_sub(1)));
        let expo = (self.w.tail_sum() / int(l) - self.w.xi()) * int(n as i64);
        Self::lm(&head).div(&Self::lm(&int(d)).pow(&rat(1, 2))).mul(&self.exp_t(&expo))
    }

    /// `P_n = C_0 C_1 ... C_n`.
    pub fn p_n(&self, n: u64) -> LogMonomial {
        (1..=n).fold(LogMonomial::one(), |acc, i| acc.mul(&self.c_n(i)))
    }

    /// `D_n = max{i >= n : L_i^(d) >= L_n^(1)}`.
    pub fn d_n(&self, n: u64) -> Result<u64> {
        let target = self.l_n(n, 0);
        let last = self.d() - 1;
        let mut i = n;
        while self.l_n(i + 1, last).cmp_exact(&target)? != Ordering::Less {
            i += 1;
        }
        Ok(i)
    }

    pub fn describe(&self, rec: &mut Record) {
        rec.scene("w", &self.w)
            .scene("eps", format_rational(&self.eps))
            .scene("t", &self.t)
            .scene("r", format_rational(&self.r))
            .scene("t0", &self.t0)
            .scene("c_prime", format_rational(&self.c_prime));
    }
}

const PREC: u32 = 96;

/// Closed form `P_n = eps^(dn) / (n!)^d * e^(xi d t n (n+1)/2)`.
pub fn p_n_closed(p: &ConstructionParams, n: u64) -> LogMonomial {
    let d = p.d() as i64;
    let fact = (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
    let eps = ConstructionParams::lm(&p.eps).pow(&int(d * n as i64));
    let f = ConstructionParams::lm(&Rational::from_integer(fact)).pow(&int(-d));
    eps.mul(&f).mul(&p.exp_t(&(p.w.xi() * int(d) * rat((n * (n + 1) / 2) as i64, 1))))
}

/// Invariant checks of the sequences over `1..=n_max`.
pub fn sequence_report(p: &ConstructionParams, n_max: u64) -> Result<Record> {
    let d = p.d();
    let l = p.w.ell();
    let mut rec = Record::new("sequences");
    p.describe(&mut rec);
    let mut decreasing = true;
    let mut ordered = true;
    let mut rho_le_1 = true;
    for n in 0..=n_max {
        for j in 0..d {
            if n < n_max && p.l_n(n + 1, j).cmp_exact(&p.l_n(n, j))? != Ordering::Less {
                decreasing = false;
            }
        }
        let ls: Vec<_> = (0..d).map(|j| p.l_n(n, j)).collect();
        for j in 1..d {
            let c = ls[j].cmp_exact(&ls[j - 1])?;
            let want = if j < l {
                c == Ordering::Equal
            } else if j == l {
                c == Ordering::Greater
            } else {
                c != Ordering::Less
            };
            ordered &= want;
        }
        if n >= 1 && p.rho_n(n).cmp_exact(&LogMonomial::one())? == Ordering::Greater {
            rho_le_1 = false;
        }
    }
    rec.count("n_max", n_max);
    rec.hypothesis("l_decreasing", decreasing);
    rec.hypothesis("l_ordered", ordered);
    rec.hypothesis("rho_le_1", rho_le_1);
    Ok(rec)
}

#[derive(Clone, Debug)]
pub struct Cor24Limit {
    /// `(n, quotient)` for `n = 1..=n_max`
    pub quotients: Vec<(u64, Interval)>,
    /// `l - 1/(1 + w_1)`
    pub limit: Rational,
}

/// `C_n prod_{j>l} L_n^(j) / L_(n-1)^(j)` as a log-monomial.
fn growth_n(p: &ConstructionParams, n: u64) -> LogMonomial {
    let mut g = p.c_n(n);
    for j in p.w.ell()..p.d() {
        g = g.mul(&p.l_n(n, j).div(&p.l_n(n - 1, j)));
    }
    g
}

pub fn growth_quotient(p: &ConstructionParams, n: u64) -> Option<Interval> {
    let num = growth_n(p, n).ln(PREC);
    let den = p.l_n(n, 0).div(&p.l_n(n - 1, 0)).ln(PREC).neg();
    num.div(&den)
}

pub fn growth_quotient_limit(w: &WeightVector) -> Rational {
    int(w.ell() as i64) - (int(1) + &w.w()[0]).recip()
}

pub fn cor24_limit(p: &ConstructionParams, ns: &[u64]) -> Result<Cor24Limit> {
    let mut quotients = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Error::invalid("quotients start at n = 1"));
        }
        let q = growth_quotient(p, n).ok_or_else(|| Error::invalid("denominator encloses zero"))?;
        quotients.push((n, q));
    }
    Ok(Cor24Limit { quotients, limit: growth_quotient_limit(&p.w) })
}

/// First `n` in `n0..=n_max` where a condition fails, if any.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cor24Hypotheses {
    pub ratio: Option<u64>,
    /// `L^(d)_(k n0 - 1) < L^(1)_(n0 - 1)`
    pub start: bool,
    pub c_window: Option<u64>,
    pub rho_window: Option<u64>,
    pub growth_floor: Option<u64>,
    pub n_max: u64,
}

impl Cor24Hypotheses {
    pub fn all_hold(&self) -> bool {
        self.start
            && self.ratio.is_none()
            && self.c_window.is_none()
            && self.rho_window.is_none()
            && self.growth_floor.is_none()
    }

    pub fn to_record(&self, p: &ConstructionParams, k: u64, n0: u64) -> Record {
        let mut rec = Record::new("cor24_hypotheses");
        p.describe(&mut rec);
        rec.scene("k", k).scene("n0", n0).scene("n_max", self.n_max);
        for (name, v) in [
            ("i_ratio", self.ratio),
            ("ii_c_window", self.c_window),
            ("iii_rho_window", self.rho_window),
            ("iv_growth_floor", self.growth_floor),
        ] {
            rec.hypothesis(name, v.is_none());
            rec.label(name, v.map_or(format!("holds up to {}", self.n_max), |n| format!("fails at n = {n}")));
        }
        rec.hypothesis("i_start", self.start);
        rec
    }
}

pub fn cor24_hypotheses(p: &ConstructionParams, k: u64, n0: u64, n_max: u64) -> Result<Cor24Hypotheses> {
    if k == 0 || n0 == 0 {
        return Err(Error::invalid("k and n0 must be at least 1"));
    }
    let d = p.d();
    let l = p.w.ell() as i64;
    let kq = int(k as i64);
    let mut h = Cor24Hypotheses { n_max, ..Default::default() };
    h.start = p.l_n(k * n0 - 1, d - 1).cmp_exact(&p.l_n(n0 - 1, 0))? == Ordering::Less;
    for n in n0..=n_max {
        let nq = int(n as i64);
        if h.ratio.is_none() {
            let lhs = p.l_n(k * n, d - 1).div(&p.l_n(k * n - 1, d - 1));
            let rhs = p.l_n(n, 0).div(&p.l_n(n - 1, 0));
            if lhs.cmp_exact(&rhs)? == Ordering::Greater {
                h.ratio = Some(n);
            }
        }
        if h.c_window.is_none() {
            let c = p.c_n(n);
            let lo = LogMonomial::exp(&nq / &kq);
            let hi = LogMonomial::exp(&nq * &kq);
            if c.cmp_exact(&lo)? == Ordering::Less || c.cmp_exact(&hi)? == Ordering::Greater {
                h.c_window = Some(n);
            }
        }
        let rho = p.rho_n(n);
        if h.rho_window.is_none() {
            let lo = LogMonomial::exp(-(&nq * &kq));
            let hi = LogMonomial::exp(-(&nq / &kq));
            if rho.cmp_exact(&lo)? == Ordering::Less || rho.cmp_exact(&hi)? == Ordering::Greater {
                h.rho_window = Some(n);
            }
        }
        if h.growth_floor.is_none() {
            let g = rho.pow(&int(l)).mul(&growth_n(p, n));
            let floor = LogMonomial::from_int(n).pow(&-kq.clone());
            if g.cmp_exact(&floor)? == Ordering::Less {
                h.growth_floor = Some(n);
            }
        }
    }
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct SEstimate {
    /// largest grid value classified as divergent
    pub sup: Option<Rational>,
    pub n_max: u64,
    /// `(tau, Q(n_max / 2), Q(n_max))`
    pub samples: Vec<(Rational, f64, f64)>,
    /// `D_n <= k n` for every `n` checked, with `k` as given
    pub d_n_bounded: bool,
    /// marks the estimate as a finite-horizon reading
    pub finite_horizon: bool,
}

/// Logs needed by the quantity in the dimension theorem, indexed by `n`.
struct LogTable {
    ln_c: Vec<f64>,
    ln_rho: Vec<f64>,
    ln_l1: Vec<f64>,
}

fn ln_f64(m: &LogMonomial) -> f64 {
    m.ln(64).to_f64()
}

/// `Q_tau(n) = log(P_n (L_n^(1))^tau rho_(n+1)^tau prod_{i=n+1}^{D_n} rho_i^l C_i) / max(D_n - n, 1)`
/// over a grid of `tau`, classifying `tau` as divergent when `Q(n_max)`
/// exceeds both `Q(n_max / 2)` and zero.
pub fn thm21_s_estimate(p: &ConstructionParams, taus: &[Rational], n_max: u64, k: u64) -> Result<SEstimate> {
    let l = p.w.ell() as f64;
    let half = (n_max / 2).max(1);
    let dn: Vec<u64> = [half, n_max].iter().map(|&n| p.d_n(n)).collect::<Result<_>>()?;
    let top = dn.iter().copied().max().unwrap_or(n_max) + 2;
    let mut t = LogTable { ln_c: Vec::new(), ln_rho: Vec::new(), ln_l1: Vec::new() };
    for i in 0..=top {
        t.ln_c.push(ln_f64(&p.c_n(i)));
        t.ln_rho.push(if i == 0 { 0.0 } else { ln_f64(&p.rho_n(i)) });
        t.ln_l1.push(ln_f64(&p.l_n(i, 0)));
    }
    let mut d_n_bounded = true;
    for n in 1..=n_max {
        if p.d_n(n)? > k * n {
            d_n_bounded = false;
            break;
        }
    }
    let parts = |n: u64, d_n: u64| -> (f64, f64) {
        let n = n as usize;
        let ln_p: f64 = t.ln_c[..=n].iter().sum();
        let tail: f64 = (n + 1..=d_n as usize).map(|i| l * t.ln_rho[i] + t.ln_c[i]).sum();
        let m = (d_n as usize).saturating_sub(n).max(1) as f64;
        ((ln_p + tail) / m, (t.ln_l1[n] + t.ln_rho[n + 1]) / m)
    };
    let (a_half, b_half) = parts(half, dn[0]);
    let (a_full, b_full) = parts(n_max, dn[1]);
    let mut sup = None;
    let mut samples = Vec::with_capacity(taus.len());
    for tau in taus {
        let x = crate::scalar::rational::to_f64(tau);
        let q_half = a_half + x * b_half;
        let q_full = a_full + x * b_full;
        if q_full > q_half && q_full > 0.0 {
            sup = Some(tau.clone());
        }
        samples.push((tau.clone(), q_half, q_full));
    }
    Ok(SEstimate { sup, n_max, samples, d_n_bounded, finite_horizon: true })
}

/// `0.01, 0.02, ..., d`.
pub fn default_tau_grid(d: usize) -> Vec<Rational> {
    (1..=(100 * d as i64)).map(|k| rat(k, 100)).collect()
}

/// Status of one largeness condition over `1..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub enum Largeness {
    Holds,
    FailsAt(u64),
    Qualitative,
}

impl Largeness {
    pub fn label(&self, n_max: u64) -> String {
        match self {
            Largeness::Holds => format!("holds for 1 <= n <= {n_max}"),
            Largeness::FailsAt(n) => format!("fails at n = {n}"),
            Largeness::Qualitative => "qualitative".into(),
        }
    }
}

fn first_failure(n_max: u64, mut f: impl FnMut(u64) -> Result<bool>) -> Result<Largeness> {
    for n in 1..=n_max {
        if !f(n)? {
            return Ok(Largeness::FailsAt(n));
        }
    }
    Ok(Largeness::Holds)
}

fn ge(a: &LogMonomial, b: &LogMonomial) -> Result<bool> {
    Ok(a.cmp_exact(b)? != Ordering::Less)
}

fn lt(a: &LogMonomial, b: &LogMonomial) -> Result<bool> {
    Ok(a.cmp_exact(b)? == Ordering::Less)
}

/// The displayed "t large enough" inequalities, labelled `t1`..`t8`, plus
/// the separation premise and the parameter window.
pub fn largeness_report(p: &ConstructionParams, n_max: u64) -> Result<Vec<(String, Largeness)>> {
    let d = p.d();
    let di = d as i64;
    let l = p.w.ell();
    let w = p.w.w();
    let xi = p.w.xi().clone();
    let tail_l = p.w.tail_sum() / int(l as i64);
    let lm = ConstructionParams::lm;
    let sep =
        lm(&(&p.c_prime * crate::scalar::rational::pow_i(&p.r, di - 1) / int(2))).div(&lm(&int(di)).pow(&rat(1, 2)));
    let c = lm(&p.consts.c);
    let mut out = Vec::new();
    out.push(("t1".to_string(), first_failure(n_max, |n| ge(&p.c_n(n).mul(&lm(&rat(1, 100))), &LogMonomial::one()))?));
    out.push(("t2".to_string(), Largeness::Qualitative));
    out.push((
        "t3".to_string(),
        first_failure(n_max, |n| ge(&lm(&p.eps).mul(&p.exp_t(&(&xi * int(n as i64)))), &LogMonomial::one()))?,
    ));
    out.push((
        "t4".to_string(),
        first_failure(n_max, |n| {
            let nq = int(n as i64);
            let e = lm(&p.eps_n(n));
            let a = c.mul(&p.exp_t(&(-(&w[d - 1] * &xi * &nq) / int(2 * di * di * di))));
            let b = p.exp_t(&-(p.w.delta() * &nq));
            Ok(lt(&a, &e)? && lt(&b, &e)?)
        })?,
    ));
    out.push((
        "t5".to_string(),
        first_failure(n_max, |n| {
            let nq = int(n as i64);
            for wi in &w[..l] {
                let lhs = lm(&(int(2) * p.eps_n(n))).mul(&p.exp_t(&(-(&xi * wi * int(n as i64 + 1)) - &tail_l * &nq)));
                if !ge(&sep, &lhs)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })?,
    ));
    out.push((
        "t6".to_string(),
        first_failure(n_max, |n| {
            let nq = int(n as i64);
            for wi in &w[l..] {
                let lhs = lm(&(int(2) * p.eps_n(n))).mul(&p.exp_t(&(wi * &nq - &xi * wi * int(n as i64 + 1))));
                if !ge(&sep, &lhs)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })?,
    ));
    out.push((
        "t7".to_string(),
        first_failure(n_max, |n| {
            let nq = int(n as i64);
            for wi in &w[l..] {
                let lhs = p.exp_tn(n, &(&w[0] - &w[l])).div(&p.exp_t(&((&xi + wi) * &nq)));
                let rhs = p.exp_t(&((&tail_l - &xi) * &nq));
                if !ge(&lhs, &rhs)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })?,
    ));
    out.push((
        "t8".to_string(),
        first_failure(n_max, |n| Ok(p.rho_n(n).cmp_exact(&LogMonomial::one())? != Ordering::Greater))?,
    ));
    out.push(("separation_n_large".to_string(), Largeness::Qualitative));
    let cap = p.consts.eps_tilde.clone().min(p.consts.s_tilde.clone())
        / (int(10_000) * crate::scalar::rational::pow_i(&int(4), di));
    let window = p.eps.is_positive() && p.eps < p.r && p.r < cap;
    out.push(("params_window".to_string(), if window { Largeness::Holds } else { Largeness::FailsAt(0) }));
    Ok(out)
}

pub fn largeness_record(p: &ConstructionParams, n_max: u64) -> Result<Record> {
    let mut rec = Record::new("largeness");
    p.describe(&mut rec);
    rec.scene("n_max", n_max);
    for (name, v) in largeness_report(p, n_max)? {
        if v != Largeness::Qualitative {
            rec.hypothesis(&name, v == Largeness::Holds);
        }
        let label = if name == "params_window" && v != Largeness::Holds {
            "fails: need 0 < eps < r < min(eps~, s~) / (10^4 4^d)".to_string()
        } else {
            v.label(n_max)
        };
        rec.label(&name, label);
    }
    Ok(rec)
}

/// Measured wedge ratio `min ||v ^ w|| / r^(D-2)` over seeded random
/// unimodular lattices, where `r` is the shortest dual length and the pairs
/// range over lattice vectors up to the second minimum. Returns `(min ratio squared, samples)`.
pub fn measure_c_prime(samples: usize, seed: u64) -> Result<(Rational, Vec<Rational>)> {
    let mut rng = Lcg::new(seed);
    let mut ratios = Vec::with_capacity(samples);
    for _ in 0..samples {
        let lat = random_unimodular(&mut rng, 3)?;
        let dual = lat.dual()?;
        let r2 = shortest_vector(&dual)?.norm_sq.as_rational().expect("rational lattice");
        let radius = euclidean_minima_sq(&lat)?[1].to_interval(64).sqrt().hi;
        let pts = nonzero_points(&Enumerator::new(&lat), &WeightedBox::cube(3, PowerScalar::rational(radius))?)?;
        let mut best: Option<Rational> = None;
        for (a, pa) in pts.iter().enumerate() {
            for pb in &pts[a + 1..] {
                let Ok(wn) = wedge_norm(&lat, &pa.frame, &pb.frame) else {
                    continue;
                };
                let g = wn.gram.as_rational().expect("rational lattice");
                if best.as_ref().is_none_or(|b| g < *b) {
                    best = Some(g);
                }
            }
        }
        // D = 3: ratio^2 = wedge^2 / r^2
        ratios.push(best.expect("lattice has two independent short vectors") / r2);
    }
    let min = ratios.iter().min().cloned().unwrap_or_else(Rational::zero);
    Ok((min, ratios))
}

/// `diag(2^a, 2^b, 2^(-a-b)) U` with `U` a product of random integer shears.
pub fn random_unimodular(rng: &mut Lcg, dim: usize) -> Result<Lattice> {
    let mut m = identity(dim);
    for _ in 0..(2 * dim) {
        let i = rng.range(0, dim as i64 - 1) as usize;
        let j = rng.range(0, dim as i64 - 1) as usize;
        if i == j {
            continue;
        }
        let k = int(rng.range(-2, 2));
        for row in m.iter_mut() {
            let add = &row[j] * &k;
            row[i] += add;
        }
    }
    let mut total = 0i64;
    for (i, row) in m.iter_mut().enumerate() {
        let e = if i + 1 == dim { -total } else { rng.range(-2, 2) };
        total += e;
        let f = if e >= 0 { int(1 << e) } else { rat(1, 1 << (-e)) };
        for x in row.iter_mut() {
            *x *= &f;
        }
    }
    Lattice::from_rational(m)
}

/// `lim` side of the count window `(1/100) C_n <= #T(y) <= 2^(d+1) C_n`.
pub fn child_count_window(p: &ConstructionParams, n: u64) -> (f64, f64) {
    let c = p.c_n(n).to_f64();
    (c / 100.0, c * f64::from(1u32 << (p.d() + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w23() -> WeightVector {
        WeightVector::new(vec![rat(2, 3), rat(1, 3)]).unwrap()
    }

    #[test]
    fn dimension_values() {
        assert_eq!(dimension_lower_bound(&WeightVector::equal(2).unwrap()), rat(4, 3));
        assert_eq!(dimension_lower_bound(&w23()), rat(7, 5));
        for d in 2..=6usize {
            let di = d as i64;
            assert_eq!(dimension_lower_bound(&WeightVector::equal(d).unwrap()), rat(di * di, di + 1));
        }
    }

    #[test]
    fn sequences_at_desk_params() {
        let p = ConstructionParams::desk_default();
        // C_n = eps_n^2 e^(2 n t)
        let c3 = p.c_n(3);
        let want = LogMonomial::from_rational(&rat(1, 36)).unwrap().mul(&LogMonomial::power_of(2, &int(18)));
        assert_eq!(c3, want);
        for n in 0..8 {
            assert_eq!(p.p_n(n), p_n_closed(&p, n));
        }
        let rec = sequence_report(&p, 50).unwrap();
        assert!(rec.hypotheses["l_decreasing"]);
        assert!(rec.hypotheses["l_ordered"]);
    }

    #[test]
    fn quotient_approaches_limit() {
        let p = ConstructionParams::desk_default();
        assert_eq!(growth_quotient_limit(&p.w), rat(2, 5));
        let c = cor24_limit(&p, &[1000]).unwrap();
        let q = c.quotients[0].1.to_f64();
        assert!((q - 0.4).abs() < 0.01, "{q}");
    }

    #[test]
    fn corollary_conditions() {
        let p = ConstructionParams::desk_default();
        let h = cor24_hypotheses(&p, 17, 2, 100).unwrap();
        assert!(h.all_hold(), "{h:?}");
        let h = cor24_hypotheses(&p, 1, 2, 20).unwrap();
        assert!(h.c_window.is_some());
    }

    #[test]
    fn d_n_bound() {
        let p = ConstructionParams::desk_default();
        for n in 1..30 {
            let d = p.d_n(n).unwrap();
            assert!(d >= n && d <= 17 * n);
            let last = p.d() - 1;
            assert!(p.l_n(d, last).cmp_exact(&p.l_n(n, 0)).unwrap() != Ordering::Less);
            assert!(p.l_n(d + 1, last).cmp_exact(&p.l_n(n, 0)).unwrap() == Ordering::Less);
        }
    }

    #[test]
    fn c_prime_measurement() {
        let (m, ratios) = measure_c_prime(12, 7).unwrap();
        assert!(m >= int(MEASURED_C_PRIME * MEASURED_C_PRIME));
        assert!(ratios.iter().all(|r| *r >= int(1)));
    }

    #[test]
    fn largeness_labels() {
        let p = ConstructionParams::desk_default();
        let rep = largeness_report(&p, 10).unwrap();
        let get = |k: &str| rep.iter().find(|(n, _)| n == k).unwrap().1.clone();
        assert_eq!(get("t2"), Largeness::Qualitative);
        assert_eq!(get("params_window"), Largeness::FailsAt(0));
        assert_eq!(get("t8"), Largeness::Holds);
    }
}
