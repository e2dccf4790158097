//! The tree of rational vectors and its rectangles.
//!
//! A node at depth `n` is `tau = p / q` with the anchor `q` in
//! `(e^(t_n)/2, e^(t_n)]`. It is kept when
//!
//! * the ray `R+ e_(d+1)` first meets `a_(t_n) h(tau) Z^(d+1)` at `q e^(-t_n)`,
//!   which is the same as `gcd(p_1, ..., p_d, q) = 1`;
//! * `a_(t_n) h(tau) Z^(d+1)` has no nonzero dual vector shorter than `eps_n^2`;
//! * `b_n a_(t_n) h(tau) Z^(d+1)` has no nonzero dual vector shorter than `r`.
//!
//! Everything here needs a grid offset so that `e^(t_n)` is an exact power
//! of `lambda`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::ConstructionParams;
use crate::error::{Error, Result};
use crate::flow::{orbit_lattice, rescale_b, FlowTime};
use crate::lattice::minima::in_k_eps_dual;
use crate::report::Record;
use crate::scalar::rational::{ceil_int, floor_int, lcm_u, pow_i};
use crate::scalar::{format_rational, int, rat, PowerScalar, PowerSum, Rational, Verdict};

impl ConstructionParams {
    fn grid(&self) -> Result<()> {
        if self.t0.is_grid() {
            Ok(())
        } else {
            Err(Error::GridViolation(format!("t_0 = {} is not on the grid", self.t0)))
        }
    }

    fn lam(&self, e: Rational) -> Result<PowerScalar> {
        PowerScalar::new(Rational::one(), self.t.lambda, e)
    }

    /// `e^(t_n)`.
    pub fn e_tn(&self, n: u64) -> Result<PowerScalar> {
        self.lam(self.grid_tn(n)?)
    }

    /// `t_n` as a grid time.
    pub fn flow_time_n(&self, n: u64) -> Result<FlowTime> {
        FlowTime::new(self.t.lambda, self.grid_tn(n)?)
    }

    /// Half-width of `beta(tau)` along axis `i` at depth `n`.
    pub fn beta_half(&self, n: u64, i: usize) -> Result<PowerScalar> {
        let wi = &self.w.w()[i];
        if n == 0 {
            return self.lam(-(wi * self.grid_tn(1)?));
        }
        Ok(self.lam(-(wi * self.grid_tn(n + 1)?) - self.grid_tn(n)?)?.scale(&self.eps_n(n)))
    }

    /// Half-width of `beta~(kappa)` along axis `i` for `kappa` at depth `m`.
    pub fn beta_tilde_half(&self, m: u64, i: usize) -> Result<PowerScalar> {
        let wi = &self.w.w()[i];
        Ok(self.lam(-(wi * self.grid_tn(m + 1)?) - self.grid_tn(m)?)?.scale(&self.eps_n(m + 1)))
    }

    /// `L_n^(i)` as an exact power.
    pub fn l_n_power(&self, n: u64, i: usize) -> Result<PowerScalar> {
        Ok(self.beta_half(n, i)?.scale(&int(2)))
    }

    /// `rho_n^2` as an exact power.
    pub fn rho_sq_power(&self, n: u64) -> Result<PowerScalar> {
        let d = self.d() as i64;
        let l = int(self.w.ell() as i64);
        let e = self.eps_n(n.saturating_sub(1));
        let c = &self.c_prime * &self.c_prime * pow_i(&self.r, 2 * (d - 1)) / (int(16 * d) * &e * &e);
        let x = int(2) * (self.w.tail_sum() / l - self.w.xi()) * int(n as i64) * &self.t.step;
        Ok(self.lam(x)?.scale(&c))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rectangle {
    pub center: Vec<Rational>,
    pub half: Vec<PowerScalar>,
}

impl Rectangle {
    pub fn beta(p: &ConstructionParams, tau: &[Rational], n: u64) -> Result<Self> {
        let half = (0..p.d()).map(|i| p.beta_half(n, i)).collect::<Result<_>>()?;
        Ok(Rectangle { center: tau.to_vec(), half })
    }

    pub fn beta_tilde(p: &ConstructionParams, tau: &[Rational], m: u64) -> Result<Self> {
        let half = (0..p.d()).map(|i| p.beta_tilde_half(m, i)).collect::<Result<_>>()?;
        Ok(Rectangle { center: tau.to_vec(), half })
    }

    /// `center_i + sign * half_i`.
    fn edge(&self, i: usize, sign: i64) -> Result<PowerSum> {
        let mut s = PowerSum::from_rational(self.center[i].clone());
        s.add_power(&self.half[i].scale(&int(sign)))?;
        Ok(s)
    }

    /// Membership in the open rectangle.
    pub fn contains_open(&self, x: &[Rational]) -> Result<bool> {
        for (i, xi) in x.iter().enumerate() {
            let mut gap = PowerSum::from_power(&self.half[i]);
            gap.add_power(&PowerScalar::rational(-(xi - &self.center[i]).abs()))?;
            if gap.signum()? != Ordering::Greater {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `self` inside `outer` (both open).
    pub fn nested_in(&self, outer: &Rectangle) -> Result<bool> {
        for i in 0..self.center.len() {
            let mut s = PowerSum::from_rational((&self.center[i] - &outer.center[i]).abs());
            s.add_power(&self.half[i])?;
            s.add_power(&outer.half[i].neg())?;
            if s.signum()? == Ordering::Greater {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Per-axis gap `max(0, |c_i - c'_i| - h_i - h'_i)`.
    pub fn gaps(&self, o: &Rectangle) -> Result<Vec<PowerSum>> {
        let mut out = Vec::with_capacity(self.center.len());
        for i in 0..self.center.len() {
            let mut g = PowerSum::from_rational((&self.center[i] - &o.center[i]).abs());
            g.add_power(&self.half[i].neg())?;
            g.add_power(&o.half[i].neg())?;
            out.push(if g.signum()? == Ordering::Greater { g } else { PowerSum::zero() });
        }
        Ok(out)
    }

    /// Open rectangles are disjoint iff some axis gap is `>= 0` before clamping.
    pub fn disjoint(&self, o: &Rectangle) -> Result<bool> {
        for i in 0..self.center.len() {
            let mut g = PowerSum::from_rational((&self.center[i] - &o.center[i]).abs());
            g.add_power(&self.half[i].neg())?;
            g.add_power(&o.half[i].neg())?;
            if g.signum()? != Ordering::Less {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Squared Euclidean distance between closures.
    pub fn dist_sq(&self, o: &Rectangle) -> Result<PowerSum> {
        let mut acc = PowerSum::zero();
        for g in self.gaps(o)? {
            acc = acc.add(&g.mul(&g)?)?;
        }
        Ok(acc)
    }
}

/// `tau = p / q` before reduction; `q` is the anchor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Candidate {
    pub q: BigInt,
    pub p: Vec<BigInt>,
}

impl Candidate {
    pub fn tau(&self) -> Vec<Rational> {
        self.p.iter().map(|pi| Rational::new(pi.clone(), self.q.clone())).collect()
    }
}

fn q_window(p: &ConstructionParams, n: u64) -> Result<(BigInt, BigInt)> {
    let e = PowerSum::from_power(&p.e_tn(n)?);
    let half = PowerSum::from_power(&p.e_tn(n)?.scale(&rat(1, 2)));
    Ok((half.floor()? + 1, e.floor()?))
}

/// All `p / q` with `q` in `(e^(t_n)/2, e^(t_n)]` inside the open `beta~(kappa)`,
/// where `kappa` sits at depth `n - 1`. Sorted by `(q, p_1, ..., p_d)`.
pub fn child_candidates(kappa: &[Rational], n: u64, p: &ConstructionParams, budget: u64) -> Result<Vec<Candidate>> {
    if n == 0 {
        return Err(Error::invalid("children live at depth >= 1"));
    }
    p.grid()?;
    let rect = Rectangle::beta_tilde(p, kappa, n - 1)?;
    let (q_lo, q_hi) = q_window(p, n)?;
    let mut out = Vec::new();
    let mut q = q_lo;
    while q <= q_hi {
        let qq = Rational::from_integer(q.clone());
        let mut ranges = Vec::with_capacity(p.d());
        let mut size = BigInt::one();
        for i in 0..p.d() {
            let lo = rect.edge(i, -1)?.mul_power(&PowerScalar::rational(qq.clone()))?;
            let hi = rect.edge(i, 1)?.mul_power(&PowerScalar::rational(qq.clone()))?;
            // open interval: lo < p < hi
            let a: BigInt = lo.floor()? + 1;
            let b = -(hi.neg().floor()?) - 1;
            if b < a {
                size = BigInt::zero();
                break;
            }
            size *= &b - &a + 1;
            ranges.push((a, b));
        }
        if !size.is_zero() {
            if BigInt::from(out.len()) + &size > BigInt::from(budget) {
                return Err(Error::EnumerationBudgetExceeded {
                    predicted: (BigInt::from(out.len()) + size).try_into().unwrap_or(u64::MAX),
                    cap: budget,
                });
            }
            let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
            'outer: loop {
                out.push(Candidate { q: q.clone(), p: cur.clone() });
                for i in (0..cur.len()).rev() {
                    if cur[i] < ranges[i].1 {
                        cur[i] += 1;
                        for (j, c) in cur.iter_mut().enumerate().skip(i + 1) {
                            *c = ranges[j].0.clone();
                        }
                        continue 'outer;
                    }
                }
                break;
            }
        }
        q += 1;
    }
    Ok(out)
}

/// Brute-force scan of every `p / q` with `q` in the anchor window and
/// `|p_i / q - kappa_i| <= reach`, filtered by exact membership.
pub struct CandidateOracle;

impl CandidateOracle {
    pub fn scan(kappa: &[Rational], n: u64, p: &ConstructionParams, reach: &Rational) -> Result<Vec<Candidate>> {
        p.grid()?;
        let rect = Rectangle::beta_tilde(p, kappa, n - 1)?;
        let e = p.e_tn(n)?;
        let mut out = Vec::new();
        let mut q = BigInt::one();
        loop {
            let qs = PowerScalar::rational(Rational::from_integer(q.clone()));
            if qs.cmp_exact(&e) == Ordering::Greater {
                break;
            }
            if qs.scale(&int(2)).cmp_exact(&e) == Ordering::Greater {
                let qq = Rational::from_integer(q.clone());
                let ranges: Vec<(BigInt, BigInt)> =
                    kappa.iter().map(|k| (floor_int(&((k - reach) * &qq)), ceil_int(&((k + reach) * &qq)))).collect();
                let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
                'outer: loop {
                    let c = Candidate { q: q.clone(), p: cur.clone() };
                    if rect.contains_open(&c.tau())? {
                        out.push(c);
                    }
                    for i in (0..cur.len()).rev() {
                        if cur[i] < ranges[i].1 {
                            cur[i] += 1;
                            for (j, c) in cur.iter_mut().enumerate().skip(i + 1) {
                                *c = ranges[j].0.clone();
                            }
                            continue 'outer;
                        }
                    }
                    break;
                }
            }
            q += 1;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionRecord {
    pub anchor: bool,
    /// `q` with `v(tau) = q e^(-t_n) e_(d+1)` when the anchor holds
    pub anchor_q: Option<BigInt>,
    pub dual_eps: Verdict,
    pub dual_r: Verdict,
}

impl ConditionRecord {
    pub fn accepted(&self) -> bool {
        self.anchor && self.dual_eps == Verdict::In && self.dual_r == Verdict::In
    }

    pub fn uncertain(&self) -> bool {
        self.dual_eps == Verdict::Uncertain || self.dual_r == Verdict::Uncertain
    }
}

/// Smallest `q > 0` with `q tau` integral, checked against the window.
fn anchor_of(p: &ConstructionParams, tau: &[Rational], n: u64) -> Result<Option<BigInt>> {
    let q = tau.iter().fold(BigInt::one(), |acc, x| lcm_u(&acc, x.denom()));
    let qs = PowerScalar::rational(Rational::from_integer(q.clone()));
    let e = p.e_tn(n)?;
    let ok = qs.cmp_exact(&e) != Ordering::Greater && qs.scale(&int(2)).cmp_exact(&e) == Ordering::Greater;
    Ok(ok.then_some(q))
}

/// `a_(t_n) h(tau) Z^(d+1)` and `b_n` times it.
pub fn flowed_lattices(
    p: &ConstructionParams,
    tau: &[Rational],
    n: u64,
) -> Result<(crate::lattice::Lattice, crate::lattice::Lattice)> {
    let l1 = orbit_lattice(tau, &p.w, &p.flow_time_n(n)?)?;
    let l2 = l1.apply_diagonal(&rescale_b(&p.w, n, &p.t)?)?;
    Ok((l1, l2))
}

/// Direct route: dual basis from the inverse frame, then echelon enumeration.
pub fn condition_check(tau: &[Rational], n: u64, p: &ConstructionParams) -> Result<ConditionRecord> {
    p.grid()?;
    let anchor_q = anchor_of(p, tau, n)?;
    let (l1, l2) = flowed_lattices(p, tau, n)?;
    let e = p.eps_n(n);
    let dual_eps = in_k_eps_dual(&l1, &PowerScalar::rational(&e * &e))?;
    let dual_r = in_k_eps_dual(&l2, &PowerScalar::rational(p.r.clone()))?;
    Ok(ConditionRecord { anchor: anchor_q.is_some(), anchor_q, dual_eps, dual_r })
}

/// Basis matrix `a_(t_n) h(tau)` (then `b_n` on the left), entries as powers.
fn basis_powers(p: &ConstructionParams, tau: &[Rational], n: u64, with_b: bool) -> Result<Vec<Vec<PowerScalar>>> {
    let d = p.d();
    let g = crate::flow::flow_matrix(&p.w, &p.flow_time_n(n)?)?;
    let b = if with_b { rescale_b(&p.w, n, &p.t)? } else { vec![PowerScalar::one(); d + 1] };
    let mut m = vec![vec![PowerScalar::zero(); d + 1]; d + 1];
    for i in 0..=d {
        let s = g[i].mul(&b[i])?;
        if i < d {
            m[i][i] = s.clone();
            m[i][d] = s.scale(&tau[i]);
        } else {
            m[d][d] = s;
        }
    }
    Ok(m)
}

fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(k - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, k - 1);
            let s = if (perm.len() - pos) % 2 == 0 { sign } else { -sign };
            out.push((p, s));
        }
    }
    out
}

/// Leibniz determinant over exact powers.
fn det_powers(m: &[Vec<PowerScalar>]) -> Result<PowerSum> {
    let mut acc = PowerSum::zero();
    for (perm, sign) in permutations(m.len()) {
        let mut prod = PowerScalar::rational(int(sign));
        for (i, &j) in perm.iter().enumerate() {
            prod = prod.mul(&m[i][j])?;
            if prod.is_zero() {
                break;
            }
        }
        if !prod.is_zero() {
            acc.add_power(&prod)?;
        }
    }
    Ok(acc)
}

/// Generalized cross product: the vector `u` with `<u, x> = det(b_1, ..., x, ..., b_D)`
/// where `x` replaces column `j`. For a unimodular basis these are the dual
/// basis vectors, which is how `Lambda* = wedge^(D-1) Lambda` is realized.
fn wedge_dual_basis(m: &[Vec<PowerScalar>]) -> Result<Vec<Vec<PowerSum>>> {
    let dim = m.len();
    let mut out = vec![vec![PowerSum::zero(); dim]; dim];
    for (j, col) in out.iter_mut().enumerate() {
        for (i, slot) in col.iter_mut().enumerate() {
            let minor: Vec<Vec<PowerScalar>> = (0..dim)
                .filter(|&r| r != i)
                .map(|r| (0..dim).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                .collect();
            let c = det_powers(&minor)?;
            *slot = if (i + j) % 2 == 0 { c } else { c.neg() };
        }
    }
    Ok(out)
}

/// Does some nonzero integer combination of `dual` have length `< radius`?
/// Coefficients obey `|c_j| = |<phi, b_j>| < radius ||b_j||`.
fn wedge_short_vector(m: &[Vec<PowerScalar>], radius: &Rational) -> Result<Verdict> {
    let dim = m.len();
    if det_powers(m)?.as_rational() != Some(Rational::one()) {
        return Err(Error::NotUnimodular("wedge route needs determinant 1".into()));
    }
    let dual = wedge_dual_basis(m)?;
    let mut bounds = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut n2 = PowerSum::zero();
        for row in m {
            n2 = n2.add(&PowerSum::from_power(&row[j].mul(&row[j])?))?;
        }
        let len = n2.to_interval(64).sqrt().hi;
        bounds.push(floor_int(&(radius * len)));
    }
    let r2 = PowerSum::from_rational(radius * radius);
    let mut cur: Vec<BigInt> = bounds.iter().map(|b| -b.clone()).collect();
    'outer: loop {
        if cur.iter().any(|c| !c.is_zero()) {
            let mut n2 = PowerSum::zero();
            for i in 0..dim {
                let mut x = PowerSum::zero();
                for (j, c) in cur.iter().enumerate() {
                    if !c.is_zero() {
                        x = x.add(&dual[j][i].mul_power(&PowerScalar::rational(Rational::from_integer(c.clone())))?)?;
                    }
                }
                n2 = n2.add(&x.mul(&x)?)?;
            }
            if n2.cmp(&r2)? == Ordering::Less {
                return Ok(Verdict::Out);
            }
        }
        for i in (0..dim).rev() {
            if cur[i] < bounds[i] {
                cur[i] += 1;
                for (j, c) in cur.iter_mut().enumerate().skip(i + 1) {
                    *c = -bounds[j].clone();
                }
                continue 'outer;
            }
        }
        break;
    }
    Ok(Verdict::In)
}

/// Independent route: dual basis by generalized cross products, brute-force
/// coefficient box, and the anchor found by scanning multiples.
pub fn condition_check_wedge(tau: &[Rational], n: u64, p: &ConstructionParams) -> Result<ConditionRecord> {
    p.grid()?;
    let e = p.e_tn(n)?;
    // first multiple m of 1 with m tau integral
    let mut anchor_q = None;
    let mut m = BigInt::one();
    loop {
        let ms = PowerScalar::rational(Rational::from_integer(m.clone()));
        if ms.cmp_exact(&e) == Ordering::Greater {
            break;
        }
        if tau.iter().all(|x| (x * Rational::from_integer(m.clone())).is_integer()) {
            if ms.scale(&int(2)).cmp_exact(&e) == Ordering::Greater {
                anchor_q = Some(m);
            }
            break;
        }
        m += 1;
    }
    let en = p.eps_n(n);
    let dual_eps = wedge_short_vector(&basis_powers(p, tau, n, false)?, &(&en * &en))?;
    let dual_r = wedge_short_vector(&basis_powers(p, tau, n, true)?, &p.r)?;
    Ok(ConditionRecord { anchor: anchor_q.is_some(), anchor_q, dual_eps, dual_r })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub tau: Vec<Rational>,
    pub q: BigInt,
    pub depth: u64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub mass: Rational,
    /// candidates examined for this node's children
    pub candidates: u64,
    pub uncertain: u64,
}

#[derive(Clone, Debug)]
pub struct FractalTree {
    pub params: ConstructionParams,
    pub nodes: Vec<TreeNode>,
    /// node indices per depth, in creation order
    pub levels: Vec<Vec<usize>>,
    /// depth requested from `expand_tree`
    pub depth: u64,
}

impl FractalTree {
    pub fn rectangle(&self, i: usize) -> Result<Rectangle> {
        let n = &self.nodes[i];
        Rectangle::beta(&self.params, &n.tau, n.depth)
    }

    pub fn level_mass(&self, n: usize) -> Rational {
        self.levels.get(n).map_or_else(Rational::zero, |l| l.iter().map(|&i| self.nodes[i].mass.clone()).sum())
    }

    pub fn to_json(&self) -> Value {
        let p = &self.params;
        let params = json!({
            "w": p.w.to_string(),
            "eps": format_rational(&p.eps),
            "t": p.t.to_string(),
            "r": format_rational(&p.r),
            "t0": p.t0.to_string(),
            "c_prime": format_rational(&p.c_prime),
            "depth": self.depth,
        });
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "tau": n.tau.iter().map(format_rational).collect::<Vec<_>>(),
                    "depth": n.depth,
                    "q": n.q.to_string(),
                    "mu": format_rational(&n.mass),
                    "children": n.children,
                })
            })
            .collect();
        json!({ "params": params, "nodes": nodes })
    }
}

/// Breadth-first expansion to `depth`; `budget` caps total nodes and the
/// candidate list of any single node.
pub fn expand_tree(p: &ConstructionParams, depth: u64, budget: u64) -> Result<FractalTree> {
    p.grid()?;
    let root = TreeNode {
        tau: vec![Rational::zero(); p.d()],
        q: BigInt::one(),
        depth: 0,
        parent: None,
        children: Vec::new(),
        mass: Rational::one(),
        candidates: 0,
        uncertain: 0,
    };
    let mut tree = FractalTree { params: p.clone(), nodes: vec![root], levels: vec![vec![0]], depth };
    for n in 1..=depth {
        let frontier = tree.levels[(n - 1) as usize].clone();
        let found: Vec<(Vec<Candidate>, u64, u64)> = frontier
            .par_iter()
            .map(|&i| {
                let cands = child_candidates(&tree.nodes[i].tau, n, p, budget)?;
                let checked: Vec<(Candidate, ConditionRecord)> = cands
                    .into_par_iter()
                    .map(|c| condition_check(&c.tau(), n, p).map(|r| (c, r)))
                    .collect::<Result<_>>()?;
                let total = checked.len() as u64;
                let unc = checked.iter().filter(|(_, r)| r.uncertain()).count() as u64;
                let kept = checked.into_iter().filter(|(_, r)| r.accepted()).map(|(c, _)| c).collect();
                Ok((kept, total, unc))
            })
            .collect::<Result<_>>()?;
        let mut level = Vec::new();
        for (&parent, (kept, total, unc)) in frontier.iter().zip(found) {
            tree.nodes[parent].candidates = total;
            tree.nodes[parent].uncertain = unc;
            for c in kept {
                if tree.nodes.len() as u64 >= budget {
                    return Err(Error::EnumerationBudgetExceeded {
                        predicted: tree.nodes.len() as u64 + 1,
                        cap: budget,
                    });
                }
                let idx = tree.nodes.len();
                tree.nodes.push(TreeNode {
                    tau: c.tau(),
                    q: c.q,
                    depth: n,
                    parent: Some(parent),
                    children: Vec::new(),
                    mass: Rational::zero(),
                    candidates: 0,
                    uncertain: 0,
                });
                tree.nodes[parent].children.push(idx);
                level.push(idx);
            }
        }
        tree.levels.push(level);
    }
    assign_measure(&mut tree);
    Ok(tree)
}

/// Uniform split among children that still have descendants at the final
/// depth; everything else gets mass zero. Each level then carries mass 1
/// whenever the final level is nonempty.
pub fn assign_measure(tree: &mut FractalTree) {
    let last = tree.levels.len() - 1;
    let mut alive = vec![false; tree.nodes.len()];
    for lvl in (0..=last).rev() {
        for &i in &tree.levels[lvl] {
            alive[i] = lvl == last || tree.nodes[i].children.iter().any(|&c| alive[c]);
        }
    }
    for node in tree.nodes.iter_mut() {
        node.mass = Rational::zero();
    }
    if alive[0] {
        tree.nodes[0].mass = Rational::one();
    }
    for lvl in 0..last {
        for &i in &tree.levels[lvl] {
            let kids: Vec<usize> = tree.nodes[i].children.iter().copied().filter(|&c| alive[c]).collect();
            if kids.is_empty() {
                continue;
            }
            let share = &tree.nodes[i].mass / int(kids.len() as i64);
            for c in kids {
                tree.nodes[c].mass = share.clone();
            }
        }
    }
}

/// Closed squares of side `L_n^(1)` meeting depth-`n` rectangles in a set
/// with nonempty interior; each parent anchors its own grid at its lower
/// corner and the counts of different parents are added.
pub fn cover_count(tree: &FractalTree, n: u64) -> Result<u64> {
    let p = &tree.params;
    let Some(level) = tree.levels.get(n as usize) else {
        return Err(Error::invalid("depth beyond the expanded tree"));
    };
    let side = p.l_n_power(n, 0)?;
    let inv = side.recip()?;
    let mut groups: std::collections::BTreeMap<usize, BTreeSet<Vec<BigInt>>> = Default::default();
    for &i in level {
        let anchor = tree.nodes[i].parent.unwrap_or(i);
        let outer = tree.rectangle(anchor)?;
        let rect = tree.rectangle(i)?;
        let mut ranges = Vec::with_capacity(p.d());
        for ax in 0..p.d() {
            let origin = outer.edge(ax, -1)?;
            let lo = rect.edge(ax, -1)?.sub(&origin)?.mul_power(&inv)?;
            let hi = rect.edge(ax, 1)?.sub(&origin)?.mul_power(&inv)?;
            let a: BigInt = lo.floor()?;
            let b = -(hi.neg().floor()?) - 1;
            ranges.push((a, b));
        }
        let set = groups.entry(anchor).or_default();
        let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
        'outer: loop {
            set.insert(cur.clone());
            for k in (0..cur.len()).rev() {
                if cur[k] < ranges[k].1 {
                    cur[k] += 1;
                    for (j, c) in cur.iter_mut().enumerate().skip(k + 1) {
                        *c = ranges[j].0.clone();
                    }
                    continue 'outer;
                }
            }
            break;
        }
    }
    Ok(groups.values().map(|s| s.len() as u64).sum())
}

/// `ln count / -ln L_n^(1)`.
pub fn box_dimension_proxy(tree: &FractalTree, n: u64) -> Result<f64> {
    let c = cover_count(tree, n)? as f64;
    let side = tree.params.l_n(n, 0).ln(64).to_f64();
    Ok(if c <= 1.0 { 0.0 } else { c.ln() / -side })
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub n: u64,
    pub pairs: u64,
    /// smallest squared sibling distance
    pub min_dist_sq: Option<PowerSum>,
    /// `(rho_n L_(n-1)^(1))^2`
    pub bound_sq: PowerScalar,
    pub all_disjoint: bool,
    pub holds: bool,
}

impl SeparationReport {
    pub fn to_record(&self, tree: &FractalTree) -> Record {
        let mut rec = Record::new("separation");
        tree.params.describe(&mut rec);
        rec.scene("n", self.n);
        rec.count("sibling_pairs", self.pairs);
        rec.ratio("bound", self.bound_sq.to_interval(64).sqrt().to_f64());
        if let Some(m) = &self.min_dist_sq {
            rec.ratio("min_distance", m.to_interval(64).sqrt().to_f64());
        }
        rec.conclusion("siblings_disjoint", self.all_disjoint);
        rec.conclusion("min_distance_ge_bound", self.holds);
        rec
    }
}

/// Minimum sibling distance at depth `n >= 1` against `rho_n L_(n-1)^(1)`.
pub fn separation_check(tree: &FractalTree, n: u64) -> Result<SeparationReport> {
    if n == 0 || n as usize >= tree.levels.len() {
        return Err(Error::invalid("separation needs 1 <= n <= depth"));
    }
    let p = &tree.params;
    let l = p.l_n_power(n - 1, 0)?;
    let bound_sq = p.rho_sq_power(n)?.mul(&l.mul(&l)?)?;
    let bound = PowerSum::from_power(&bound_sq);
    let mut rep = SeparationReport { n, pairs: 0, min_dist_sq: None, bound_sq, all_disjoint: true, holds: true };
    for &parent in &tree.levels[(n - 1) as usize] {
        let kids = &tree.nodes[parent].children;
        let rects: Vec<Rectangle> = kids.iter().map(|&c| tree.rectangle(c)).collect::<Result<_>>()?;
        for a in 0..rects.len() {
            for b in a + 1..rects.len() {
                rep.pairs += 1;
                rep.all_disjoint &= rects[a].disjoint(&rects[b])?;
                let d2 = rects[a].dist_sq(&rects[b])?;
                if d2.cmp(&bound)? == Ordering::Less {
                    rep.holds = false;
                }
                let smaller = match &rep.min_dist_sq {
                    None => true,
                    Some(m) => d2.cmp(m)? == Ordering::Less,
                };
                if smaller {
                    rep.min_dist_sq = Some(d2);
                }
            }
        }
    }
    Ok(rep)
}

/// Structural checks of an expanded tree: nesting, sibling disjointness,
/// anchors in the window, parent links and per-level mass.
pub fn tree_report(tree: &FractalTree) -> Result<Record> {
    let p = &tree.params;
    let mut rec = Record::new("tree");
    p.describe(&mut rec);
    rec.scene("depth", tree.depth);
    let mut nested = true;
    let mut disjoint = true;
    let mut anchored = true;
    let mut linked = true;
    for (i, node) in tree.nodes.iter().enumerate() {
        if let Some(par) = node.parent {
            linked &= tree.nodes[par].depth + 1 == node.depth && tree.nodes[par].children.contains(&i);
            nested &= tree.rectangle(i)?.nested_in(&tree.rectangle(par)?)?;
            anchored &= anchor_of(p, &node.tau, node.depth)?.as_ref() == Some(&node.q);
        }
        let rects: Vec<Rectangle> = node.children.iter().map(|&c| tree.rectangle(c)).collect::<Result<_>>()?;
        for a in 0..rects.len() {
            for b in a + 1..rects.len() {
                disjoint &= rects[a].disjoint(&rects[b])?;
            }
        }
    }
    rec.conclusion("nested", nested);
    rec.conclusion("siblings_disjoint", disjoint);
    rec.conclusion("anchor_in_window", anchored);
    rec.conclusion("parent_links", linked);
    let full = tree.levels.last().is_some_and(|l| !l.is_empty());
    let mass_ok = (0..tree.levels.len()).all(|n| tree.level_mass(n) == Rational::one());
    rec.hypothesis("last_level_nonempty", full);
    rec.conclusion("mass_one_per_level", mass_ok);
    for (n, lvl) in tree.levels.iter().enumerate() {
        rec.count(&format!("level_{n}_nodes"), lvl.len() as u64);
    }
    // child counts against the window (1/100) C_n <= #T(y) <= 2^(d+1) C_n
    let mut counts_ge_c = true;
    let mut in_window = true;
    let mut mu_bound = true;
    for n in 1..tree.levels.len() as u64 {
        let (lo, hi) = super::child_count_window(p, n);
        let c = p.c_n(n).to_f64();
        for &i in &tree.levels[(n - 1) as usize] {
            let k = tree.nodes[i].children.len() as f64;
            in_window &= lo <= k && k <= hi;
            counts_ge_c &= k >= c;
        }
        let pn = p.p_n(n);
        for &i in &tree.levels[n as usize] {
            let m = &tree.nodes[i].mass;
            if m.is_positive() {
                let lm = crate::scalar::LogMonomial::from_rational(m)?;
                mu_bound &= lm.mul(&pn).cmp_exact(&crate::scalar::LogMonomial::one())? != Ordering::Greater;
            }
        }
    }
    rec.hypothesis("child_counts_ge_c_n", counts_ge_c);
    rec.label("child_count_window", if in_window { "every node inside" } else { "some node outside" });
    rec.label("mu_le_inv_p_n", if mu_bound { "holds" } else { "fails" });
    if counts_ge_c {
        rec.conclusion("mu_le_inv_p_n", mu_bound);
    }
    let unc: u64 = tree.nodes.iter().map(|n| n.uncertain).sum();
    rec.count("uncertain_checks", unc);
    Ok(rec)
}

/// Per-node child counts as `(node, depth, candidates, children, lo, hi)`.
pub fn child_count_rows(tree: &FractalTree) -> Vec<(usize, u64, u64, usize, f64, f64)> {
    let last = tree.levels.len() as u64 - 1;
    tree.nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.depth < last)
        .map(|(i, n)| {
            let (lo, hi) = super::child_count_window(&tree.params, n.depth + 1);
            (i, n.depth, n.candidates, n.children.len(), lo, hi)
        })
        .collect()
}

/// `q` of a reduced vector: the lcm of the denominators.
pub fn lcm_denominator(tau: &[Rational]) -> BigInt {
    tau.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::WeightVector;
    use crate::fractal::TimeOffset;

    pub(crate) fn tiny() -> ConstructionParams {
        let w = WeightVector::new(vec![rat(3, 5), rat(2, 5)]).unwrap();
        let t = FlowTime::new(2, int(3)).unwrap();
        ConstructionParams::new(w, rat(1, 2), t, rat(1, 4), TimeOffset::grid(int(0))).unwrap()
    }

    #[test]
    fn q_window_at_64() {
        let w = WeightVector::new(vec![rat(2, 3), rat(1, 3)]).unwrap();
        let t = FlowTime::new(2, int(6)).unwrap();
        let p = ConstructionParams::new(w, rat(1, 2), t, rat(1, 4), TimeOffset::grid(int(0))).unwrap();
        assert_eq!(q_window(&p, 1).unwrap(), (BigInt::from(33), BigInt::from(64)));
    }

    #[test]
    fn candidates_match_scan() {
        let p = tiny();
        let root = vec![Rational::zero(); 2];
        let fast = child_candidates(&root, 1, &p, 1_000_000).unwrap();
        let slow = CandidateOracle::scan(&root, 1, &p, &int(1)).unwrap();
        assert_eq!(fast, slow);
        assert!(!fast.is_empty());
        let rect = Rectangle::beta_tilde(&p, &root, 0).unwrap();
        for c in &fast {
            assert!(rect.contains_open(&c.tau()).unwrap());
        }
        let mut sorted = fast.clone();
        sorted.sort();
        assert_eq!(sorted, fast);
    }

    #[test]
    fn both_routes_agree_at_depth_one() {
        let p = tiny();
        let root = vec![Rational::zero(); 2];
        for c in child_candidates(&root, 1, &p, 1_000_000).unwrap() {
            let a = condition_check(&c.tau(), 1, &p).unwrap();
            let b = condition_check_wedge(&c.tau(), 1, &p).unwrap();
            assert_eq!(a, b, "{:?}", c);
        }
    }

    #[test]
    fn huge_eps_rejects_everything() {
        let mut p = tiny();
        // eps_1^2 = 9/4 exceeds sqrt(3), the Minkowski bound for unimodular duals
        p.eps = rat(3, 2);
        let root = vec![Rational::zero(); 2];
        for c in child_candidates(&root, 1, &p, 1_000_000).unwrap().iter().take(12) {
            assert_eq!(condition_check(&c.tau(), 1, &p).unwrap().dual_eps, Verdict::Out);
        }
    }

    #[test]
    fn anchor_is_the_reduced_denominator() {
        let p = tiny();
        let r = condition_check(&[rat(1, 7), rat(0, 1)], 1, &p).unwrap();
        assert_eq!(r.anchor_q, Some(BigInt::from(7)));
        let r = condition_check(&[rat(1, 3), rat(0, 1)], 1, &p).unwrap();
        assert!(!r.anchor);
    }

    #[test]
    fn depth_zero_tree() {
        let t = expand_tree(&tiny(), 0, 100).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.nodes[0].mass, int(1));
        assert_eq!(cover_count(&t, 0).unwrap(), 2);
    }

    #[test]
    fn grid_required() {
        let p = ConstructionParams::desk_default();
        assert!(matches!(expand_tree(&p, 1, 100), Err(Error::GridViolation(_))));
    }

    #[test]
    fn rectangles_chain() {
        let p = tiny();
        for n in 0..4 {
            for i in 0..2 {
                let l = p.l_n_power(n, i).unwrap().to_interval(64).to_f64();
                assert!((l - p.l_n(n, i).to_f64()).abs() < 1e-12 * l.max(1.0));
            }
        }
    }
}
