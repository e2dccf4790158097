//! Dense exact linear algebra on small matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

/// Row-major rational matrix.
pub type QMat = Vec<Vec<Rational>>;
/// Row-major integer matrix.
pub type ZMat = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> QMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

pub fn zidentity(n: usize) -> ZMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![Rational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &QMat, v: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y)).collect()
}

pub fn mat_vec_int(a: &QMat, v: &[BigInt]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| {
                if y.is_zero() {
                    acc
                } else {
                    acc + x * Rational::from_integer(y.clone())
                }
            })
        })
        .collect()
}

pub fn zmat_vec(a: &ZMat, v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn det(m: &QMat) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    d
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut a: QMat = m.iter().cloned().collect();
    let mut inv = identity(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        inv.swap(p, c);
        let piv = a[c][c].recip();
        for k in 0..n {
            a[c][k] *= &piv;
            inv[c][k] *= &piv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for k in 0..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
                let t = &f * &inv[c][k];
                inv[r][k] -= t;
            }
        }
    }
    Some(inv)
}

/// Incremental rank over the rationals.
#[derive(Clone, Debug, Default)]
pub struct RankTracker {
    /// reduced rows with their pivot columns
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RankTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        v
    }

    pub fn is_independent(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().any(|x| !x.is_zero())
    }

    /// Adds `v`; returns whether the rank went up.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&v) {
                *x -= &f * y;
            }
        }
        self.rows.push((p, v));
        true
    }
}

pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let mut t = RankTracker::new();
    for v in vectors {
        t.insert(v);
    }
    t.rank()
}

/// Column echelon form by unimodular column operations.
///
/// Returns `(h, u, pivots)` with `m * u = h`, where column `j` of `h` is zero
/// above row `pivots[j]`, has a positive entry there, and pivot rows have
/// zeros to the right of the pivot. Entries left of a pivot are reduced into
/// `[0, pivot)`. Columns beyond `pivots.len()` are zero.
pub fn column_echelon(m: &ZMat) -> (ZMat, ZMat, Vec<usize>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut h = m.clone();
    let mut u = zidentity(cols);
    let mut pivots = Vec::new();
    let mut col = 0;

    // column operation helpers on both h and u
    fn col_axpy(x: &mut ZMat, dst: usize, src: usize, f: &BigInt) {
        for row in x.iter_mut() {
            let t = &row[src] * f;
            row[dst] += t;
        }
    }
    fn col_swap(x: &mut ZMat, a: usize, b: usize) {
        for row in x.iter_mut() {
            row.swap(a, b);
        }
    }
    fn col_neg(x: &mut ZMat, a: usize) {
        for row in x.iter_mut() {
            row[a] = -row[a].clone();
        }
    }

    for i in 0..rows {
        if col == cols {
            break;
        }
        // Euclid across columns col.. on row i
        loop {
            let nz: Vec<usize> = (col..cols).filter(|&j| !h[i][j].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let jmin = *nz.iter().min_by_key(|&&j| h[i][j].abs()).unwrap();
            if jmin != col {
                col_swap(&mut h, jmin, col);
                col_swap(&mut u, jmin, col);
            }
            if nz.len() == 1 {
                break;
            }
            for j in col + 1..cols {
                if h[i][j].is_zero() {
                    continue;
                }
                let q = -h[i][j].div_floor(&h[i][col]);
                col_axpy(&mut h, j, col, &q);
                col_axpy(&mut u, j, col, &q);
            }
        }
        if h[i][col].is_zero() {
            continue;
        }
        if h[i][col].is_negative() {
            col_neg(&mut h, col);
            col_neg(&mut u, col);
        }
        for j in 0..col {
            let q = -h[i][j].div_floor(&h[i][col]);
            if !q.is_zero() {
                col_axpy(&mut h, j, col, &q);
                col_axpy(&mut u, j, col, &q);
            }
        }
        pivots.push(i);
        col += 1;
    }
    (h, u, pivots)
}

/// Integer basis of `{c in Z^n : a . c = 0}` as columns.
pub fn integer_kernel(a: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let (_, u, pivots) = column_echelon(&vec![a.to_vec()]);
    let start = pivots.len();
    (start..n).map(|j| (0..n).map(|i| u[i][j].clone()).collect()).collect()
}

pub fn common_denominator(m: &QMat) -> BigInt {
    m.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn gcd_big(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational::{int, rat};

    fn z(rows: &[&[i64]]) -> ZMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn zmul(a: &ZMat, b: &ZMat) -> ZMat {
        let n = a.len();
        let k = b.len();
        let m = b[0].len();
        (0..n).map(|i| (0..m).map(|j| (0..k).fold(BigInt::zero(), |s, l| s + &a[i][l] * &b[l][j])).collect()).collect()
    }

    #[test]
    fn determinant_examples() {
        let m = vec![vec![int(1), int(1)], vec![int(0), int(3)]];
        assert_eq!(det(&m), int(3));
        let m = vec![vec![rat(2, 1), int(0)], vec![int(0), rat(1, 2)]];
        assert_eq!(det(&m), int(1));
        let inv = inverse(&vec![vec![int(1), int(1)], vec![int(0), int(3)]]).unwrap();
        assert_eq!(inv, vec![vec![int(1), rat(-1, 3)], vec![int(0), rat(1, 3)]]);
    }

    #[test]
    fn echelon_is_unimodular_and_triangular() {
        let m = z(&[&[4, 6, 2], &[1, 0, 5], &[3, 3, 3]]);
        let (h, u, piv) = column_echelon(&m);
        assert_eq!(zmul(&m, &u), h);
        assert_eq!(piv, vec![0, 1, 2]);
        for j in 0..3 {
            for i in 0..piv[j] {
                assert!(h[i][j].is_zero());
            }
            assert!(h[piv[j]][j].is_positive());
        }
        let det_u = det(&u.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect());
        assert_eq!(det_u.abs(), int(1));
    }

    #[test]
    fn kernel_of_row() {
        let a: Vec<BigInt> = [2, 3, 5].iter().map(|&x| BigInt::from(x)).collect();
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v.iter().zip(&a).fold(BigInt::zero(), |s, (x, y)| s + x * y).is_zero());
        }
    }

    #[test]
    fn rank_tracking() {
        let mut t = RankTracker::new();
        assert!(t.insert(&[int(1), int(2)]));
        assert!(!t.insert(&[int(2), int(4)]));
        assert!(t.insert(&[int(0), int(1)]));
        assert_eq!(t.rank(), 2);
    }
}
