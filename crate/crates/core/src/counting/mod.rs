//! Weighted-box counting scenes.
//!
//! A scene is a lattice `Lambda` in `R^(d+1)` with radii `r = (r_1, ..., r_d, 1)`
//! and a slab width `s`. Dual vectors are measured by the boxes
//! `N_q = M*_{r'}` with `r' = (min(q/r_1, s), ..., min(q/r_d, s), q)`.
//! The bad set collects primitive points of `M_r` killed by some primitive
//! dual vector in `N_{(d+1) s r_M}`.

pub mod zeta;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{flow_matrix, FlowTime, WeightVector};
use crate::lattice::matrix::{gcd_big, integer_kernel, mat_mul, RankTracker};
use crate::lattice::minima::{in_k_eps_dual, nonzero_points, successive_minima};
use crate::lattice::norms::{weighted_sup_norm, DualFunctional};
use crate::lattice::{Enumerator, Lattice, WeightedBox};
use crate::report::Record;
use crate::scalar::{int, rat, Cmp3, Interval, PowerScalar, Rational, Verdict};

pub use zeta::zeta;

/// Scenes predicted to hold more points than this are refused.
pub const SCENE_LIMIT: u64 = 1_000_000;

/// `theta(K, Lambda) = vol(K) / cov(Lambda)`.
pub fn theta(k: &WeightedBox, lat: &Lattice) -> Result<PowerScalar> {
    k.volume()?.div(&lat.covolume()?)
}

#[derive(Clone, Debug)]
pub struct PrimitiveDensity {
    pub count: u64,
    pub theta: PowerScalar,
    pub zeta: Interval,
    /// `count * zeta(D) / theta`
    pub ratio: f64,
    /// `lambda_D(K, Lambda) <= 1`
    pub precondition: bool,
}

/// Exact primitive count in `K` against the density `theta / zeta(D)`.
pub fn primitive_count_vs_zeta(lat: &Lattice, k: &WeightedBox) -> Result<PrimitiveDensity> {
    let d = lat.dim();
    let th = theta(k, lat)?;
    let z = zeta(d as u32)?;
    let minima = successive_minima(lat, k)?;
    let precondition = minima.last().is_some_and(|m| m.cmp_exact(&PowerScalar::one()) != Ordering::Greater);
    let count = Enumerator::new(lat).count_primitive(k)?;
    let ratio = count as f64 * z.to_f64() / th.to_interval(64).to_f64();
    Ok(PrimitiveDensity { count, theta: th, zeta: z, ratio, precondition })
}

/// `(Lambda, r, s)` with `r_i >= 1`, `r_(d+1) = 1` and `0 < s < 1/2`.
#[derive(Clone, Debug)]
pub struct CountingScene {
    pub lattice: Lattice,
    pub r: Vec<PowerScalar>,
    pub s: PowerScalar,
    dual: Lattice,
}

impl CountingScene {
    pub fn new(lattice: Lattice, r: Vec<PowerScalar>, s: PowerScalar) -> Result<Self> {
        Self::with_limit(lattice, r, s, SCENE_LIMIT)
    }

    pub fn with_limit(lattice: Lattice, r: Vec<PowerScalar>, s: PowerScalar, limit: u64) -> Result<Self> {
        let dim = lattice.dim();
        if dim < 3 || r.len() != dim {
            return Err(Error::invalid("scene needs d >= 2 and d+1 radii"));
        }
        if r[dim - 1] != PowerScalar::one() {
            return Err(Error::invalid("last radius must be 1"));
        }
        if r.iter().any(|x| x.cmp_exact(&PowerScalar::one()) == Ordering::Less) {
            return Err(Error::invalid("radii must be at least 1"));
        }
        if s.signum() != Ordering::Greater || s.cmp_exact(&PowerScalar::rational(rat(1, 2))) != Ordering::Less {
            return Err(Error::invalid("s must lie in (0, 1/2)"));
        }
        let dual = lattice.dual()?;
        let scene = CountingScene { lattice, r, s, dual };
        let predicted = scene.predicted_size()?;
        if predicted > limit {
            return Err(Error::EnumerationBudgetExceeded { predicted, cap: limit });
        }
        Ok(scene)
    }

    pub fn d(&self) -> usize {
        self.lattice.dim() - 1
    }

    pub fn dual(&self) -> &Lattice {
        &self.dual
    }

    pub fn r_max(&self) -> &PowerScalar {
        self.r[..self.d()].iter().reduce(|a, b| a.max(b)).expect("d >= 2")
    }

    pub fn r_min(&self) -> &PowerScalar {
        self.r[..self.d()].iter().reduce(|a, b| a.min(b)).expect("d >= 2")
    }

    pub fn box_r(&self) -> Result<WeightedBox> {
        WeightedBox::new(self.r.clone())
    }

    /// `q = (d+1) s r_M`, the size of the dual box in the bad-set definition.
    pub fn bad_q(&self) -> Result<PowerScalar> {
        Ok(self.s.mul(self.r_max())?.scale(&int(self.d() as i64 + 1)))
    }

    /// Volume heuristic for the larger of the two point sets `bad_set` lists.
    pub fn predicted_size(&self) -> Result<u64> {
        let a = theta(&self.box_r()?, &self.lattice)?;
        let b = theta(&nq_box(self, &self.bad_q()?)?, &self.dual)?;
        let m = a.max(&b).to_interval(32).hi;
        Ok(m.ceil().to_integer().try_into().unwrap_or(u64::MAX))
    }
}

/// `N_q(r, s) = M*_{r'}` with `r' = (min(q/r_i, s), ..., q)`.
pub fn nq_box(scene: &CountingScene, q: &PowerScalar) -> Result<WeightedBox> {
    let d = scene.d();
    let mut radii = Vec::with_capacity(d + 1);
    for ri in &scene.r[..d] {
        radii.push(q.div(ri)?.min(&scene.s).clone());
    }
    radii.push(q.clone());
    WeightedBox::new(radii)
}

/// Smallest `q` with `phi in N_q`, or `None` when some `|x_i| > s` (`i <= d`).
pub fn q_of(scene: &CountingScene, phi: &DualFunctional) -> Result<Option<PowerScalar>> {
    let d = scene.d();
    if phi.coords[..d].iter().any(|x| x.abs().cmp_exact(&scene.s) == Ordering::Greater) {
        return Ok(None);
    }
    weighted_sup_norm(phi, &scene.r).map(Some)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QThresholds {
    /// `q_1 <= ... <= q_(d+1)`; `None` when no `q` reaches that rank
    pub values: Vec<Option<PowerScalar>>,
    /// distinct `q(phi)` values seen up to the last finite threshold
    pub candidates: Vec<PowerScalar>,
}

impl QThresholds {
    pub fn first(&self) -> Option<&PowerScalar> {
        self.values[0].as_ref()
    }

    pub fn last(&self) -> Option<&PowerScalar> {
        self.values.last().and_then(|x| x.as_ref())
    }
}

/// Rank of `Lambda* ∩ [-s, s]^d x R`. The lattice meets the last axis in a
/// rank-one group (the frame is rational), so this is one more than the rank
/// of the projected lattice inside the cube.
fn slab_rank(scene: &CountingScene) -> Result<usize> {
    let d = scene.d();
    let dual = scene.dual();
    let proj = Lattice::from_generators(dual.scales()[..d].to_vec(), dual.frame()[..d].to_vec())?;
    let mut t = RankTracker::new();
    for p in nonzero_points(&Enumerator::new(&proj), &WeightedBox::cube(d, scene.s.clone())?)? {
        t.insert(&p.frame);
    }
    Ok(1 + t.rank())
}

fn cmp_q(a: &PowerScalar, b: &PowerScalar) -> Ordering {
    a.cmp_exact(b)
}

/// Exact thresholds: points of `Lambda*` in `N_Q` for doubling `Q`, then a
/// greedy independent sweep in order of `q(phi)`.
pub fn q_thresholds(scene: &CountingScene) -> Result<QThresholds> {
    let target = slab_rank(scene)?;
    let dim = scene.d() + 1;
    let dual = scene.dual();
    let e = Enumerator::new(dual);
    let mut big_q = PowerScalar::one();
    loop {
        let pts = nonzero_points(&e, &nq_box(scene, &big_q)?)?;
        let mut t = RankTracker::new();
        for p in &pts {
            t.insert(&p.frame);
        }
        if t.rank() >= target {
            let mut keyed = Vec::with_capacity(pts.len());
            for p in pts {
                let phi = DualFunctional::from_dual_point(dual, &p.frame);
                let q = q_of(scene, &phi)?.expect("points of N_Q have finite q");
                keyed.push((q, p.frame));
            }
            keyed.sort_by(|a, b| cmp_q(&a.0, &b.0));
            let mut t = RankTracker::new();
            let mut values = Vec::with_capacity(dim);
            let mut candidates: Vec<PowerScalar> = Vec::new();
            for (q, y) in keyed {
                if values.len() == target {
                    break;
                }
                if candidates.last() != Some(&q) {
                    candidates.push(q.clone());
                }
                if t.insert(&y) {
                    values.push(Some(q));
                }
            }
            values.resize(dim, None);
            return Ok(QThresholds { values, candidates });
        }
        big_q = big_q.scale(&int(2));
    }
}

/// Rank of `N_q ∩ Lambda*`.
pub fn rank_at(scene: &CountingScene, q: &PowerScalar) -> Result<usize> {
    let mut t = RankTracker::new();
    for p in nonzero_points(&Enumerator::new(scene.dual()), &nq_box(scene, q)?)? {
        t.insert(&p.frame);
    }
    Ok(t.rank())
}

fn primitive_coeffs(e: &Enumerator, k: &WeightedBox) -> Result<Vec<Vec<BigInt>>> {
    Ok(e.primitive_points(k)?.iter().map(|c| e.basis_coeffs_of(c)).collect())
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Primitive dual vectors in `N_{(d+1) s r_M}`, as coefficients in the dual basis.
pub fn bad_functionals(scene: &CountingScene) -> Result<Vec<Vec<BigInt>>> {
    primitive_coeffs(&Enumerator::new(scene.dual()), &nq_box(scene, &scene.bad_q()?)?)
}

/// `S(Lambda, r, s)` as sorted coefficient vectors in the basis of `Lambda`.
///
/// Lists both point sets and tests every pairing. The dual basis is
/// `(B^-1)^T`, so `phi(v)` is the dot product of coefficient vectors.
pub fn bad_set(scene: &CountingScene) -> Result<Vec<Vec<BigInt>>> {
    let phis = bad_functionals(scene)?;
    if phis.is_empty() {
        return Ok(Vec::new());
    }
    let vs = primitive_coeffs(&Enumerator::new(&scene.lattice), &scene.box_r()?)?;
    let mut out: Vec<Vec<BigInt>> =
        vs.into_par_iter().filter(|v| phis.iter().any(|phi| dot(phi, v).is_zero())).collect();
    out.sort();
    Ok(out)
}

/// Same set, enumerated functional by functional: the kernel of each `phi`
/// is a sublattice of `Lambda`, whose points in `M_r` are listed directly.
pub fn bad_set_phi_major(scene: &CountingScene) -> Result<Vec<Vec<BigInt>>> {
    let lat = &scene.lattice;
    let k = scene.box_r()?;
    let mut out = BTreeSet::new();
    for phi in bad_functionals(scene)? {
        let ker = integer_kernel(&phi);
        let n = phi.len();
        let kmat: Vec<Vec<Rational>> =
            (0..n).map(|i| ker.iter().map(|col| Rational::from_integer(col[i].clone())).collect()).collect();
        let sub = Lattice::new_sublattice(lat.scales().to_vec(), mat_mul(lat.frame(), &kmat))?;
        let e = Enumerator::new(&sub);
        e.for_each(&k, |c| {
            let sc = e.basis_coeffs_of(c);
            let v: Vec<BigInt> = (0..n).map(|i| ker.iter().zip(&sc).map(|(col, x)| &col[i] * x).sum()).collect();
            if gcd_big(&v).is_one() {
                out.insert(v);
            }
        })?;
    }
    Ok(out.into_iter().collect())
}

fn le(a: &PowerScalar, b: &PowerScalar) -> bool {
    a.cmp_exact(b) != Ordering::Greater
}

fn ratio_f64(n: u64, denom: &PowerScalar) -> f64 {
    n as f64 / f(denom)
}

fn f(x: &PowerScalar) -> f64 {
    x.to_interval(64).to_f64()
}

/// `q log q <= bound`, decided by interval refinement.
fn qlogq_le(q: &PowerScalar, bound: &PowerScalar) -> Cmp3 {
    for prec in [64u32, 128, 256] {
        let iv = q.to_interval(prec);
        let Some(ln) = iv.ln() else {
            return Cmp3::Uncertain;
        };
        let c = iv.mul(&ln).compare(&bound.to_interval(prec));
        if c != Cmp3::Uncertain {
            return c;
        }
    }
    Cmp3::Uncertain
}

/// Hypotheses of the two-case counting lemma and the observed bad-set ratio.
pub fn lemma38_hypotheses(scene: &CountingScene) -> Result<Record> {
    let th = q_thresholds(scene)?;
    let bad = bad_set(scene)?;
    counting_record(scene, &th, bad.len() as u64)
}

fn counting_record(scene: &CountingScene, th: &QThresholds, bad: u64) -> Result<Record> {
    let d = scene.d();
    let s = &scene.s;
    let vol = scene.box_r()?.volume()?;
    let (rm, r_big) = (scene.r_min(), scene.r_max());
    let equal = rm.cmp_exact(r_big) == Ordering::Equal;
    let s_inv2 = s.powi(-2)?;
    let q1_ok = th.first().is_some_and(|q| le(&s_inv2, q));

    let mut rec = Record::new("counting_lemma");
    rec.scene("d", d).scene("s", s).scene("r", join(&scene.r));
    rec.label(
        "q",
        th.values.iter().map(|q| q.as_ref().map_or("inf".into(), |x| x.to_string())).collect::<Vec<_>>().join(","),
    );
    rec.hypothesis("q1_ge_s_pow_minus_2", q1_ok);
    if !q1_ok {
        rec.note("hypothesis q1 >= s^-2 fails");
    }
    // case 1: q_(d+1) <= d s^(-1/2) r_M, squared
    let c1 = th.last().map_or(Ok(false), |q| -> Result<bool> {
        let rhs = r_big.mul(r_big)?.scale(&int((d * d) as i64)).div(s)?;
        Ok(le(&q.mul(q)?, &rhs))
    })?;
    let c2 = match th.last() {
        None => false,
        Some(q) => match qlogq_le(q, &s.mul(r_big)?) {
            Cmp3::Less | Cmp3::Equal => true,
            Cmp3::Greater => false,
            Cmp3::Uncertain => {
                rec.note("q log q comparison undecided; treated as failing");
                false
            }
        },
    };
    rec.hypothesis("radii_equal", equal);
    rec.hypothesis("case1_bound", c1);
    rec.hypothesis("case2_bound", c2);
    let case = if q1_ok && equal && c1 {
        Some(1)
    } else if q1_ok && !equal && c2 {
        Some(2)
    } else {
        None
    };
    rec.label("case", case.map_or("none".to_string(), |c: u8| c.to_string()));
    rec.count("bad_set", bad);
    rec.ratio("volume", f(&vol));
    rec.ratio("bad_over_sqrt_s_vol", bad as f64 / (f(&vol) * f(s).sqrt()));
    rec.ratio("bad_over_s2_vol", ratio_f64(bad, &vol.mul(&s.mul(s)?)?));
    Ok(rec)
}

fn join(v: &[PowerScalar]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Constants the counting lemmas leave existential, with the defaults used
/// throughout (`eps~ = s~ = 1/100`, `c = 2`).
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaConstants {
    pub c: Rational,
    pub eps_tilde: Rational,
    pub s_tilde: Rational,
}

impl Default for LemmaConstants {
    fn default() -> Self {
        LemmaConstants { c: int(2), eps_tilde: rat(1, 100), s_tilde: rat(1, 100) }
    }
}

fn check_dual_eps2(lat: &Lattice, eps: &Rational) -> Result<Verdict> {
    in_k_eps_dual(lat, &PowerScalar::rational(eps * eps))
}

/// Flow scene `(a_t Lambda, (eps e^t, ..., eps e^t, 1), eps^2)`.
pub fn flow_scene(lat: &Lattice, w: &WeightVector, eps: &Rational, t: &FlowTime) -> Result<CountingScene> {
    let d = w.d();
    if lat.dim() != d + 1 {
        return Err(Error::invalid("lattice dimension must be d+1"));
    }
    let flowed = lat.apply_diagonal(&flow_matrix(w, t)?)?;
    let ri = t.exp(&int(1))?.scale(eps);
    let mut r = vec![ri; d];
    r.push(PowerScalar::one());
    CountingScene::new(flowed, r, PowerScalar::rational(eps * eps))
}

/// Checks `#S(a_t Lambda, r, s) <= eps^(1/2) vol(M_r)` and reports the
/// hypotheses (membership, the eps-window) separately from the conclusion.
pub fn flow_scene_lemma39(
    lat: &Lattice,
    w: &WeightVector,
    eps: &Rational,
    t: &FlowTime,
    consts: &LemmaConstants,
) -> Result<Record> {
    let d = w.d() as i64;
    let member = check_dual_eps2(lat, eps)?;
    let scene = flow_scene(lat, w, eps, t)?;
    let eps_p = PowerScalar::rational(eps.clone());
    let lower = t.exp(&(-&w.w()[w.d() - 1] / int(2 * d * d * d)))?.scale(&consts.c);
    let th = q_thresholds(&scene)?;
    let bad = bad_set(&scene)?.len() as u64;
    let vol = scene.box_r()?.volume()?;
    let mut rec = counting_record(&scene, &th, bad)?;
    rec.kind = "flow_scene_small_eps".into();
    rec.scene("w", w).scene("eps", eps).scene("t", t);
    rec.hypotheses.clear();
    rec.hypothesis("lattice_in_k_star_eps2", member == Verdict::In);
    rec.hypothesis("eps_above_c_exp", lower.cmp_exact(&eps_p) == Ordering::Less);
    rec.hypothesis("eps_below_eps_tilde", *eps < consts.eps_tilde);
    // #S <= eps^(1/2) vol  <=>  #S^2 <= eps vol^2
    let n = PowerScalar::from_int(bad as i64);
    let holds = le(&n.mul(&n)?, &vol.mul(&vol)?.scale(eps));
    rec.conclusion("bad_le_sqrt_eps_vol", holds);
    rec.ratio("bad_over_sqrt_eps_vol", bad as f64 / (f(&vol) * f(&eps_p).sqrt()));
    if !rec.all_hypotheses_hold() {
        rec.note("hypothesis fails; conclusion evaluated anyway");
    }
    Ok(rec)
}

/// Diagonal `b~_t`: `e^((xi w_i - W/l) t)` for `i <= l`, `e^((1+xi) w_i t)`
/// after that, and `e^(-xi t)` last.
pub fn bbar(w: &WeightVector, t: &FlowTime) -> Result<Vec<PowerScalar>> {
    let l = w.ell();
    let tail = w.tail_sum() / int(l as i64);
    let xi = w.xi();
    let mut out = Vec::with_capacity(w.d() + 1);
    for (i, wi) in w.w().iter().enumerate() {
        let c = if i < l { xi * wi - &tail } else { (int(1) + xi) * wi };
        out.push(t.exp(&c)?);
    }
    out.push(t.exp(&-xi.clone())?);
    Ok(out)
}

/// Radii `eps e^((xi - W/l) t)` for `i <= l`, `eps e^((xi + w_i) t)` after, 1 last.
pub fn rescaled_radii(w: &WeightVector, eps: &Rational, t: &FlowTime) -> Result<Vec<PowerScalar>> {
    let l = w.ell();
    let tail = w.tail_sum() / int(l as i64);
    let xi = w.xi();
    let mut r = Vec::with_capacity(w.d() + 1);
    for (i, wi) in w.w().iter().enumerate() {
        let c = if i < l { xi - &tail } else { xi + wi };
        r.push(t.exp(&c)?.scale(eps));
    }
    r.push(PowerScalar::one());
    Ok(r)
}

/// Checks `#S(b~_t Lambda, r, s) <= s vol(M_r)` with the delta-window
/// `e^(-delta t) < eps < s < s~` reported as hypotheses.
pub fn flow_scene_lemma310(
    lat: &Lattice,
    w: &WeightVector,
    eps: &Rational,
    s: &Rational,
    t: &FlowTime,
    consts: &LemmaConstants,
) -> Result<Record> {
    if lat.dim() != w.d() + 1 {
        return Err(Error::invalid("lattice dimension must be d+1"));
    }
    let member = check_dual_eps2(lat, eps)?;
    let flowed = lat.apply_diagonal(&bbar(w, t)?)?;
    let scene = CountingScene::new(flowed, rescaled_radii(w, eps, t)?, PowerScalar::rational(s.clone()))?;
    let th = q_thresholds(&scene)?;
    let bad = bad_set(&scene)?.len() as u64;
    let vol = scene.box_r()?.volume()?;
    let mut rec = counting_record(&scene, &th, bad)?;
    rec.kind = "flow_scene_rescaled".into();
    rec.scene("w", w).scene("eps", eps).scene("t", t).scene("delta", crate::scalar::format_rational(w.delta()));
    rec.hypotheses.clear();
    rec.hypothesis("lattice_in_k_star_eps2", member == Verdict::In);
    let lower = t.exp(&-w.delta().clone())?;
    rec.hypothesis(
        "eps_above_exp_minus_delta_t",
        lower.cmp_exact(&PowerScalar::rational(eps.clone())) == Ordering::Less,
    );
    rec.hypothesis("eps_below_s", eps < s);
    rec.hypothesis("s_below_s_tilde", *s < consts.s_tilde);
    let holds = le(&PowerScalar::from_int(bad as i64), &vol.scale(s));
    rec.conclusion("bad_le_s_vol", holds);
    rec.ratio("bad_over_s_vol", ratio_f64(bad, &vol.scale(s)));
    if !rec.all_hypotheses_hold() {
        rec.note("hypothesis fails; conclusion evaluated anyway");
    }
    Ok(rec)
}

/// Whether a coefficient vector is primitive and nonzero.
pub fn is_primitive_big(v: &[BigInt]) -> bool {
    gcd_big(v).is_one()
}

/// `-v` for every `v`, re-sorted; used to check closure under negation.
pub fn negated(set: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = set.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::identity;

    fn diag(v: &[Rational]) -> Lattice {
        let mut m = identity(v.len());
        for (i, x) in v.iter().enumerate() {
            m[i][i] = x.clone();
        }
        Lattice::from_rational(m).unwrap()
    }

    fn radii(v: &[Rational]) -> Vec<PowerScalar> {
        v.iter().cloned().map(PowerScalar::rational).collect()
    }

    fn ps(q: Rational) -> PowerScalar {
        PowerScalar::rational(q)
    }

    #[test]
    fn theta_examples() {
        let z2 = Lattice::integer_standard(2);
        let k = WeightedBox::from_rationals(&[int(2), rat(1, 2)]).unwrap();
        assert_eq!(theta(&k, &z2).unwrap(), PowerScalar::from_int(4));
        let k = WeightedBox::from_rationals(&vec![int(1); 3]).unwrap();
        assert_eq!(theta(&k, &Lattice::integer_standard(3)).unwrap(), PowerScalar::from_int(8));
        let l = diag(&[int(2), rat(1, 2)]);
        let k = WeightedBox::from_rationals(&[int(1), int(1)]).unwrap();
        assert_eq!(theta(&k, &l).unwrap(), PowerScalar::from_int(4));
    }

    #[test]
    fn small_primitive_count() {
        let k = WeightedBox::from_rationals(&[int(2), int(2)]).unwrap();
        let p = primitive_count_vs_zeta(&Lattice::integer_standard(2), &k).unwrap();
        assert_eq!(p.count, 16);
        assert!(p.precondition);
    }

    #[test]
    fn thresholds_by_definition() {
        // e_1^*, e_2^* have |x_i| = 1 > s and never enter any N_q
        let sc =
            CountingScene::new(Lattice::integer_standard(3), radii(&[int(4), int(2), int(1)]), ps(rat(1, 4))).unwrap();
        let th = q_thresholds(&sc).unwrap();
        assert_eq!(th.values, vec![Some(PowerScalar::one()), None, None]);
        // Lambda = 4 Z^3: dual (1/4) Z^3 fits the slab
        let sc = CountingScene::new(diag(&vec![int(4); 3]), radii(&[int(4), int(2), int(1)]), ps(rat(1, 4))).unwrap();
        let th = q_thresholds(&sc).unwrap();
        assert_eq!(th.values, vec![Some(ps(rat(1, 4))), Some(ps(rat(1, 2))), Some(ps(int(1)))]);
    }

    #[test]
    fn thresholds_scale_with_dual() {
        let r = radii(&[int(4), int(2), int(1)]);
        let a = q_thresholds(&CountingScene::new(diag(&vec![int(40); 3]), r.clone(), ps(rat(1, 40))).unwrap()).unwrap();
        let b = q_thresholds(&CountingScene::new(diag(&vec![int(4); 3]), r, ps(rat(1, 4))).unwrap()).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_eq!(x.as_ref().unwrap().scale(&int(10)), *y.as_ref().unwrap());
        }
    }

    #[test]
    fn bad_set_primitive_plane() {
        // only multiples of e_3^* survive the slab, so S is the primitive
        // points of Z^2 x {0} in the box
        let sc =
            CountingScene::new(Lattice::integer_standard(3), radii(&[int(4), int(4), int(1)]), ps(rat(1, 4))).unwrap();
        let s = bad_set(&sc).unwrap();
        let mut oracle = Vec::new();
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                if num_integer::Integer::gcd(&a, &b) == 1 {
                    oracle.push(vec![BigInt::from(a), BigInt::from(b), BigInt::zero()]);
                }
            }
        }
        oracle.sort();
        assert_eq!(s, oracle);
        assert_eq!(bad_set_phi_major(&sc).unwrap(), s);
        assert_eq!(negated(&s), s);
    }

    #[test]
    fn empty_bad_set() {
        // dual vectors (0,0,c) need |c| <= 3 s r_M = 3/10 < 1
        let sc =
            CountingScene::new(Lattice::integer_standard(3), radii(&[int(1), int(1), int(1)]), ps(rat(1, 10))).unwrap();
        assert!(bad_functionals(&sc).unwrap().is_empty());
        assert!(bad_set(&sc).unwrap().is_empty());
        assert!(bad_set_phi_major(&sc).unwrap().is_empty());
    }

    #[test]
    fn two_case_bound_reports() {
        let sc =
            CountingScene::new(diag(&[int(4), int(4), rat(1, 16)]), radii(&[int(64), int(64), int(1)]), ps(rat(1, 4)))
                .unwrap();
        let rec = lemma38_hypotheses(&sc).unwrap();
        assert_eq!(rec.labels["case"], "1");
        let sc = CountingScene::new(
            diag(&[rat(5, 2), int(8), rat(1, 20)]),
            radii(&[int(16), int(160), int(1)]),
            ps(rat(9, 20)),
        )
        .unwrap();
        let rec = lemma38_hypotheses(&sc).unwrap();
        assert_eq!(rec.labels["case"], "2");
        let sc =
            CountingScene::new(Lattice::integer_standard(3), radii(&[int(4), int(4), int(1)]), ps(rat(1, 4))).unwrap();
        let rec = lemma38_hypotheses(&sc).unwrap();
        assert!(!rec.hypotheses["q1_ge_s_pow_minus_2"]);
        assert_eq!(rec.labels["case"], "none");
    }

    #[test]
    fn rescaled_diagonal() {
        let w = WeightVector::new(vec![rat(2, 3), rat(1, 3)]).unwrap();
        assert_eq!(*w.delta(), rat(1, 216));
        let t = FlowTime::new(8, int(1)).unwrap();
        let b = bbar(&w, &t).unwrap();
        // (e^((w1-w2)t), e^(2 w2 t), e^(-t)) at e^t = 8
        assert_eq!(b, vec![ps(int(2)), ps(int(4)), ps(rat(1, 8))]);
    }

    #[test]
    fn flow_scene_reports() {
        let w = WeightVector::new(vec![rat(2, 3), rat(1, 3)]).unwrap();
        let t = FlowTime::new(2, int(4)).unwrap();
        let rec =
            flow_scene_lemma39(&Lattice::integer_standard(3), &w, &rat(1, 2), &t, &LemmaConstants::default()).unwrap();
        assert!(rec.hypotheses["lattice_in_k_star_eps2"]);
        assert!(!rec.hypotheses["eps_below_eps_tilde"]);
        assert!(rec.conclusions.contains_key("bad_le_sqrt_eps_vol"));
        let t = FlowTime::new(8, int(1)).unwrap();
        let rec = flow_scene_lemma310(
            &Lattice::integer_standard(3),
            &w,
            &rat(1, 4),
            &rat(1, 3),
            &t,
            &LemmaConstants::default(),
        )
        .unwrap();
        assert!(!rec.hypotheses["s_below_s_tilde"]);
        assert!(rec.conclusions.contains_key("bad_le_s_vol"));
    }
}
