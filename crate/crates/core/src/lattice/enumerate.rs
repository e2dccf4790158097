//! Exact enumeration of lattice points in weighted boxes.
//!
//! The frame is brought to column echelon form `H = R U` (`U` unimodular), so
//! the coordinate at pivot row `p_j` depends only on the first `j+1` echelon
//! coefficients. A depth-first scan then gets an exact integer range for each
//! coefficient from the box bound on its pivot row. Rows between pivots are
//! fully determined by earlier coefficients and prune the scan. Nothing is
//! approximated: floors of irrational bounds are settled by refinement.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::{column_echelon, common_denominator, QMat, ZMat};
use super::{Lattice, WeightedBox};
use crate::error::{Error, Result};
use crate::scalar::{Interval, PowerScalar, Rational};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Enumeration cap: `SLL_BUDGET` if set and valid, else 10^7.
pub fn default_budget() -> u64 {
    std::env::var("SLL_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Debug)]
pub struct Enumerator {
    scales: Vec<PowerScalar>,
    /// echelon basis in frame coordinates, `dim x rank`
    h: QMat,
    /// `frame * u = h`
    u: ZMat,
    pivots: Vec<usize>,
    budget: u64,
}

#[derive(Clone, Debug)]
struct Bound {
    b: PowerScalar,
    iv: Interval,
}

impl Bound {
    fn new(b: PowerScalar) -> Self {
        let iv = b.to_interval(64);
        Bound { b, iv }
    }

    /// `floor(b + p)`.
    fn floor_plus(&self, p: &Rational) -> BigInt {
        if let Some(q) = self.b.as_rational() {
            return (q + p).floor().to_integer();
        }
        let lo = (&self.iv.lo + p).floor().to_integer();
        let hi = (&self.iv.hi + p).floor().to_integer();
        if lo == hi {
            return lo;
        }
        self.b.floor_shifted(p)
    }

    /// `|y| <= b`.
    fn admits(&self, y: &Rational) -> bool {
        let a = y.abs();
        if let Some(q) = self.b.as_rational() {
            return &a <= q;
        }
        if a < self.iv.lo {
            return true;
        }
        if a > self.iv.hi {
            return false;
        }
        self.b.cmp_exact(&PowerScalar::rational(a)) != Ordering::Less
    }
}

struct Scan<'a, F> {
    e: &'a Enumerator,
    row_bounds: Vec<Bound>,
    /// `b_{p_j} / h_{p_j, j}` per level
    level_bounds: Vec<Bound>,
    visit: Option<F>,
    nodes: u64,
    leaves: u64,
    k: Vec<i64>,
}

fn to_i64(x: &BigInt, cap: u64) -> Result<i64> {
    x.to_i64().ok_or(Error::EnumerationBudgetExceeded { predicted: u64::MAX, cap })
}

impl<'a, F: FnMut(&[i64])> Scan<'a, F> {
    fn over_budget(&self) -> Result<()> {
        let used = self.nodes.max(self.leaves);
        if used > self.e.budget {
            return Err(Error::EnumerationBudgetExceeded { predicted: used, cap: self.e.budget });
        }
        Ok(())
    }

    fn rec(&mut self, j: usize, y: &[Rational]) -> Result<()> {
        let e = self.e;
        let rank = e.pivots.len();
        let first_row = if j == 0 { 0 } else { e.pivots[j - 1] + 1 };
        let p = e.pivots[j];
        for i in first_row..p {
            if !self.row_bounds[i].admits(&y[i]) {
                return Ok(());
            }
        }
        let h = &e.h[p][j];
        let shift = &y[p] / h;
        let hi = self.level_bounds[j].floor_plus(&-shift.clone());
        let lo = -self.level_bounds[j].floor_plus(&shift);
        if lo > hi {
            return Ok(());
        }
        let (lo, hi) = (to_i64(&lo, e.budget)?, to_i64(&hi, e.budget)?);
        if (hi - lo) as u64 >= e.budget {
            return Err(Error::EnumerationBudgetExceeded { predicted: (hi - lo) as u64 + 1, cap: e.budget });
        }
        let last = j + 1 == rank;
        let trailing = last && p + 1 < e.h.len();
        if last && !trailing && self.visit.is_none() {
            self.nodes += 1;
            self.leaves += (hi - lo + 1) as u64;
            return self.over_budget();
        }
        for kj in lo..=hi {
            self.k[j] = kj;
            if last && !trailing {
                self.leaves += 1;
                if let Some(f) = self.visit.as_mut() {
                    f(&self.k);
                }
                continue;
            }
            self.nodes += 1;
            self.over_budget()?;
            let kq = Rational::from_integer(kj.into());
            let mut y2 = y.to_vec();
            for (i, row) in e.h.iter().enumerate().skip(p) {
                if !row[j].is_zero() {
                    y2[i] += &row[j] * &kq;
                }
            }
            if last {
                if (p + 1..e.h.len()).all(|i| self.row_bounds[i].admits(&y2[i])) {
                    self.leaves += 1;
                    if let Some(f) = self.visit.as_mut() {
                        f(&self.k);
                    }
                }
            } else {
                self.rec(j + 1, &y2)?;
            }
        }
        Ok(())
    }
}

impl Enumerator {
    pub fn new(lat: &Lattice) -> Self {
        let frame = lat.frame();
        let den = common_denominator(frame);
        let dq = Rational::from_integer(den.clone());
        let m: ZMat = frame.iter().map(|r| r.iter().map(|x| (x * &dq).to_integer()).collect()).collect();
        let (hz, u, pivots) = column_echelon(&m);
        let h = hz.iter().map(|r| r.iter().map(|x| Rational::new(x.clone(), den.clone())).collect()).collect();
        Enumerator { scales: lat.scales().to_vec(), h, u, pivots, budget: default_budget() }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn bounds(&self, k: &WeightedBox) -> Result<(Vec<Bound>, Vec<Bound>)> {
        if k.dim() != self.scales.len() {
            return Err(Error::invalid("box dimension does not match lattice"));
        }
        let rows =
            k.radii.iter().zip(&self.scales).map(|(r, s)| r.div(s).map(Bound::new)).collect::<Result<Vec<_>>>()?;
        let levels = self
            .pivots
            .iter()
            .enumerate()
            .map(|(j, &p)| Ok(Bound::new(rows[p].b.scale(&self.h[p][j].recip()))))
            .collect::<Result<Vec<_>>>()?;
        Ok((rows, levels))
    }

    fn scan<F: FnMut(&[i64])>(&self, k: &WeightedBox, visit: Option<F>) -> Result<u64> {
        let (row_bounds, level_bounds) = self.bounds(k)?;
        let dim = self.h.len();
        let mut s = Scan { e: self, row_bounds, level_bounds, visit, nodes: 0, leaves: 0, k: vec![0; self.rank()] };
        if self.rank() == 0 {
            if let Some(f) = s.visit.as_mut() {
                f(&[]);
            }
            return Ok(1);
        }
        s.rec(0, &vec![Rational::zero(); dim])?;
        Ok(s.leaves)
    }

    /// Number of lattice points in the box (0 included).
    pub fn count(&self, k: &WeightedBox) -> Result<u64> {
        self.scan::<fn(&[i64])>(k, None)
    }

    /// Calls `f` with the echelon coefficients of every point in the box.
    /// The count is checked against the budget before any callback runs.
    pub fn for_each<F: FnMut(&[i64])>(&self, k: &WeightedBox, f: F) -> Result<u64> {
        self.count(k)?;
        self.scan(k, Some(f))
    }

    /// Echelon coefficient vectors of all points in the box.
    pub fn points(&self, k: &WeightedBox) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        self.for_each(k, |c| out.push(c.to_vec()))?;
        Ok(out)
    }

    /// Primitive points of the box as echelon coefficients. `U` is
    /// unimodular, so primitivity is `gcd = 1` in either coordinate system.
    pub fn primitive_points(&self, k: &WeightedBox) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        self.for_each(k, |c| {
            if is_primitive(c) {
                out.push(c.to_vec())
            }
        })?;
        Ok(out)
    }

    /// Number of primitive points in the box.
    pub fn count_primitive(&self, k: &WeightedBox) -> Result<u64> {
        let mut n = 0;
        self.for_each(k, |c| {
            if is_primitive(c) {
                n += 1
            }
        })?;
        Ok(n)
    }

    /// Frame coordinates of an echelon coefficient vector.
    pub fn frame_of(&self, c: &[i64]) -> Vec<Rational> {
        self.h
            .iter()
            .map(|row| {
                row.iter().zip(c).fold(Rational::zero(), |acc, (x, &k)| {
                    if k == 0 {
                        acc
                    } else {
                        acc + x * Rational::from_integer(k.into())
                    }
                })
            })
            .collect()
    }

    /// Coefficients in the lattice's own basis.
    pub fn basis_coeffs_of(&self, c: &[i64]) -> Vec<BigInt> {
        self.u
            .iter()
            .map(|row| row.iter().zip(c).fold(BigInt::zero(), |acc, (x, &k)| acc + x * BigInt::from(k)))
            .collect()
    }

    pub fn echelon(&self) -> &QMat {
        &self.h
    }

    pub fn is_unit_pivot(&self) -> bool {
        self.pivots.iter().enumerate().all(|(j, &p)| self.h[p][j].is_one())
    }
}

pub fn is_primitive(c: &[i64]) -> bool {
    super::matrix::gcd_all(c) == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::identity;
    use crate::scalar::rational::{int, rat};

    fn count(l: &Lattice, r: &[Rational]) -> u64 {
        Enumerator::new(l).count(&WeightedBox::from_rationals(r).unwrap()).unwrap()
    }

    #[test]
    fn small_boxes() {
        assert_eq!(count(&Lattice::integer_standard(2), &[rat(5, 2), rat(3, 2)]), 15);
        let l = Lattice::from_rational(vec![vec![int(2), int(0)], vec![int(0), int(2)]]).unwrap();
        assert_eq!(count(&l, &[int(1), int(1)]), 1);
        assert_eq!(count(&Lattice::integer_standard(3), &[int(2), int(2), int(2)]), 125);
    }

    #[test]
    fn skew_lattice_matches_brute_force() {
        let b = vec![vec![int(3), int(1)], vec![int(1), rat(2, 3)]];
        let l = Lattice::from_rational(b.clone()).unwrap();
        let r = [rat(7, 2), rat(5, 2)];
        let e = Enumerator::new(&l);
        let got = e.count(&WeightedBox::from_rationals(&r).unwrap()).unwrap();
        let mut want = 0;
        for a in -40i64..=40 {
            for c in -40i64..=40 {
                let x = &b[0][0] * int(a) + &b[0][1] * int(c);
                let y = &b[1][0] * int(a) + &b[1][1] * int(c);
                if x.abs() <= r[0] && y.abs() <= r[1] {
                    want += 1;
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn primitive_examples() {
        let e = Enumerator::new(&Lattice::integer_standard(2));
        let r = WeightedBox::from_rationals(&[int(2), int(2)]).unwrap();
        // oracle: gcd filter over the 5x5 grid
        let mut want = 0;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                if super::super::matrix::gcd_all(&[a, b]) == 1 {
                    want += 1;
                }
            }
        }
        assert_eq!(want, 16);
        assert_eq!(e.count_primitive(&r).unwrap(), want);
        let z = Lattice::integer_standard(2);
        assert!(z.primitive_filter(&[vec![int(2), int(4)]]).is_empty());
        assert_eq!(z.primitive_filter(&[vec![int(0), int(1)]]).len(), 1);
    }

    #[test]
    fn irrational_scales() {
        // diag(2^(1/2), 1) Z^2 in [-3,3]^2: |a| <= 3/sqrt2 -> a in -2..2, b in -3..3
        let s = vec![PowerScalar::new(int(1), 2, rat(1, 2)).unwrap(), PowerScalar::one()];
        let l = Lattice::new(s, identity(2)).unwrap();
        assert_eq!(count(&l, &[int(3), int(3)]), 35);
    }

    #[test]
    fn budget_is_enforced() {
        let e = Enumerator::new(&Lattice::integer_standard(2)).with_budget(100);
        let r = WeightedBox::from_rationals(&[int(10), int(10)]).unwrap();
        assert!(matches!(e.count(&r), Err(Error::EnumerationBudgetExceeded { .. })));
    }

    #[test]
    fn sublattice_rank_deficient() {
        // plane x + y + z = 0 inside Z^3, box [-1,1]^3: 0, ±(1,-1,0), ±(1,0,-1), ±(0,1,-1)
        let frame = vec![vec![int(1), int(0)], vec![int(-1), int(1)], vec![int(0), int(-1)]];
        let l = Lattice::new_sublattice(vec![PowerScalar::one(); 3], frame).unwrap();
        assert_eq!(count(&l, &[int(1), int(1), int(1)]), 7);
    }
}
