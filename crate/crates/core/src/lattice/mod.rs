//! Lattices with exact bases of the form `diag(s) * R`.
//!
//! `s` is a vector of positive [`PowerScalar`] row scales sharing one radical
//! base and `R` is a rational frame whose columns are the basis vectors. This
//! shape is closed under the diagonal flow, shears and duality, which is all
//! the applications need, and it keeps box and norm predicates exact.

pub mod enumerate;
pub mod json;
pub mod matrix;
pub mod minima;
pub mod norms;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{PowerScalar, PowerSum, Rational};
use matrix::{det, inverse, transpose, QMat};

pub use enumerate::{default_budget, Enumerator};
pub use minima::successive_minima;
pub use norms::{box_dual_norm, weighted_sup_norm, DualFunctional};

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    scales: Vec<PowerScalar>,
    /// `dim x rank`, row-major; columns are basis vectors before scaling
    frame: QMat,
}

/// Box `M_r = {|x_i| <= r_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedBox {
    pub radii: Vec<PowerScalar>,
}

impl WeightedBox {
    pub fn new(radii: Vec<PowerScalar>) -> Result<Self> {
        if radii.iter().any(|r| r.signum() != std::cmp::Ordering::Greater) {
            return Err(Error::invalid("box radii must be positive"));
        }
        Ok(WeightedBox { radii })
    }

    pub fn from_rationals(r: &[Rational]) -> Result<Self> {
        Self::new(r.iter().cloned().map(PowerScalar::rational).collect())
    }

    pub fn cube(dim: usize, r: PowerScalar) -> Result<Self> {
        Self::new(vec![r; dim])
    }

    pub fn dim(&self) -> usize {
        self.radii.len()
    }

    /// `prod 2 r_i`.
    pub fn volume(&self) -> Result<PowerScalar> {
        self.radii.iter().try_fold(PowerScalar::one(), |acc, r| acc.mul(&r.scale(&Rational::from_integer(2.into()))))
    }

    pub fn scaled(&self, mu: &PowerScalar) -> Result<Self> {
        Self::new(self.radii.iter().map(|r| r.mul(mu)).collect::<Result<_>>()?)
    }
}

impl Lattice {
    /// Full-rank lattice from rational basis columns given row-major.
    pub fn from_rational(basis: QMat) -> Result<Self> {
        let n = basis.len();
        Self::new(vec![PowerScalar::one(); n], basis)
    }

    pub fn integer_standard(n: usize) -> Self {
        Self::from_rational(matrix::identity(n)).expect("identity is nonsingular")
    }

    /// Full-rank lattice `diag(scales) * frame`.
    pub fn new(scales: Vec<PowerScalar>, frame: QMat) -> Result<Self> {
        let l = Self::new_sublattice(scales, frame)?;
        if l.rank() != l.dim() {
            return Err(Error::invalid("basis must be square"));
        }
        if det(&l.frame).is_zero() {
            return Err(Error::SingularBasis);
        }
        Ok(l)
    }

    /// Possibly lower-rank lattice; columns must be independent.
    pub fn new_sublattice(scales: Vec<PowerScalar>, frame: QMat) -> Result<Self> {
        let n = scales.len();
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if frame.len() != n {
            return Err(Error::invalid("frame rows must match the number of scales"));
        }
        let k = frame[0].len();
        if frame.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("ragged basis matrix"));
        }
        if scales.iter().any(|s| s.signum() != std::cmp::Ordering::Greater) {
            return Err(Error::invalid("row scales must be positive"));
        }
        let base = scales.iter().map(|s| s.base()).filter(|&b| b != 1).collect::<Vec<_>>();
        if let Some(&b0) = base.first() {
            if let Some(&b1) = base.iter().find(|&&b| b != b0) {
                return Err(Error::IncompatibleBases(b0, b1));
            }
        }
        if matrix::rank(&transpose(&frame)) != k {
            return Err(Error::DependentVectors);
        }
        Ok(Lattice { scales, frame })
    }

    pub fn dim(&self) -> usize {
        self.scales.len()
    }

    pub fn rank(&self) -> usize {
        self.frame.first().map_or(0, |r| r.len())
    }

    pub fn scales(&self) -> &[PowerScalar] {
        &self.scales
    }

    pub fn frame(&self) -> &QMat {
        &self.frame
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    /// Basis entry `(i, j)` as an exact scalar.
    pub fn entry(&self, i: usize, j: usize) -> PowerScalar {
        self.scales[i].scale(&self.frame[i][j])
    }

    /// `|det(basis)|`.
    pub fn covolume(&self) -> Result<PowerScalar> {
        if !self.is_full_rank() {
            return Err(Error::invalid("covolume of a lower-rank lattice"));
        }
        let d = det(&self.frame);
        if d.is_zero() {
            return Err(Error::SingularBasis);
        }
        let s = self.scales.iter().try_fold(PowerScalar::one(), |acc, x| acc.mul(x))?;
        Ok(s.scale(&d.abs()))
    }

    pub fn is_unimodular(&self) -> Result<bool> {
        Ok(self.covolume()?.cmp_exact(&PowerScalar::one()) == std::cmp::Ordering::Equal)
    }

    pub fn require_unimodular(&self) -> Result<()> {
        let c = self.covolume()?;
        if c.cmp_exact(&PowerScalar::one()) != std::cmp::Ordering::Equal {
            return Err(Error::NotUnimodular(c.to_string()));
        }
        Ok(())
    }

    /// Dual lattice with basis `(B^-1)^T = diag(1/s) (R^-1)^T`.
    pub fn dual(&self) -> Result<Lattice> {
        if !self.is_full_rank() {
            return Err(Error::invalid("dual of a lower-rank lattice"));
        }
        let inv = inverse(&self.frame).ok_or(Error::SingularBasis)?;
        let scales = self.scales.iter().map(|s| s.recip()).collect::<Result<Vec<_>>>()?;
        Lattice::new(scales, transpose(&inv))
    }

    /// `diag(g) * self` for positive diagonal `g`.
    pub fn apply_diagonal(&self, g: &[PowerScalar]) -> Result<Lattice> {
        if g.len() != self.dim() {
            return Err(Error::invalid("diagonal size mismatch"));
        }
        let scales = self.scales.iter().zip(g).map(|(s, x)| s.mul(x)).collect::<Result<Vec<_>>>()?;
        Lattice::new_sublattice(scales, self.frame.clone())
    }

    /// `M * self` for a rational matrix `M` that commutes with the row
    /// scales (for example an upper unitriangular shear conjugated into the
    /// frame by the caller). Only valid when `M` is rational in frame space.
    pub fn apply_frame_map(&self, m: &QMat) -> Result<Lattice> {
        Lattice::new_sublattice(self.scales.clone(), matrix::mat_mul(m, &self.frame))
    }

    /// Frame coordinates of the lattice vector with integer coefficients `c`.
    pub fn frame_point(&self, c: &[BigInt]) -> Vec<Rational> {
        matrix::mat_vec_int(&self.frame, c)
    }

    /// Actual coordinates `s_i * y_i`.
    pub fn coords(&self, y: &[Rational]) -> Vec<PowerScalar> {
        self.scales.iter().zip(y).map(|(s, v)| s.scale(v)).collect()
    }

    /// Squared Euclidean norm of the vector with frame coordinates `y`.
    pub fn norm_sq(&self, y: &[Rational]) -> Result<PowerSum> {
        let mut acc = PowerSum::zero();
        for (s, v) in self.scales.iter().zip(y) {
            if v.is_zero() {
                continue;
            }
            acc.add_power(&s.mul(s)?.scale(&(v * v)))?;
        }
        Ok(acc)
    }

    /// Euclidean inner product of two vectors given in frame coordinates.
    pub fn inner(&self, a: &[Rational], b: &[Rational]) -> Result<PowerSum> {
        let mut acc = PowerSum::zero();
        for ((s, x), y) in self.scales.iter().zip(a).zip(b) {
            let p = x * y;
            if p.is_zero() {
                continue;
            }
            acc.add_power(&s.mul(s)?.scale(&p))?;
        }
        Ok(acc)
    }

    /// Box norm `max_i |v_i| / r_i` of a frame vector.
    pub fn box_norm(&self, y: &[Rational], k: &WeightedBox) -> Result<PowerScalar> {
        let mut best = PowerScalar::zero();
        for ((s, v), r) in self.scales.iter().zip(y).zip(&k.radii) {
            if v.is_zero() {
                continue;
            }
            let x = s.scale(&v.abs()).div(r)?;
            if x.cmp_exact(&best) == std::cmp::Ordering::Greater {
                best = x;
            }
        }
        Ok(best)
    }

    /// Whether two full-rank lattices are equal as sets (`B1^-1 B2` integral unimodular).
    pub fn same_lattice(&self, o: &Lattice) -> Result<bool> {
        if self.dim() != o.dim() || !self.is_full_rank() || !o.is_full_rank() {
            return Ok(false);
        }
        // row scales must agree up to a rational factor per row
        let mut rescaled = Vec::with_capacity(self.dim());
        for (i, (a, b)) in self.scales.iter().zip(&o.scales).enumerate() {
            let ratio = b.div(a)?;
            let Some(q) = ratio.as_rational() else {
                return Ok(false);
            };
            rescaled.push(o.frame[i].iter().map(|x| x * q).collect::<Vec<_>>());
        }
        let inv = inverse(&self.frame).ok_or(Error::SingularBasis)?;
        let t = matrix::mat_mul(&inv, &rescaled);
        if t.iter().flatten().any(|x| !x.denom().is_one()) {
            return Ok(false);
        }
        Ok(det(&t).abs().is_one())
    }

    /// Basis vectors in frame coordinates.
    pub fn basis_columns(&self) -> Vec<Vec<Rational>> {
        transpose(&self.frame)
    }

    /// Lattice generated by possibly dependent rational columns.
    pub fn from_generators(scales: Vec<PowerScalar>, frame: QMat) -> Result<Self> {
        let den = matrix::common_denominator(&frame);
        let dq = Rational::from_integer(den.clone());
        let m: matrix::ZMat = frame.iter().map(|r| r.iter().map(|x| (x * &dq).to_integer()).collect()).collect();
        let (h, _, pivots) = matrix::column_echelon(&m);
        let k = pivots.len();
        if k == 0 {
            return Err(Error::invalid("generators span the zero lattice"));
        }
        let basis = h.iter().map(|r| r[..k].iter().map(|x| Rational::new(x.clone(), den.clone())).collect()).collect();
        Lattice::new_sublattice(scales, basis)
    }

    /// Integer coefficients of a frame vector, if it lies in the lattice.
    pub fn coefficients_of(&self, y: &[Rational]) -> Option<Vec<BigInt>> {
        if !self.is_full_rank() {
            return None;
        }
        let inv = inverse(&self.frame)?;
        let c = matrix::mat_vec(&inv, y);
        c.iter().all(|x| x.is_integer()).then(|| c.into_iter().map(|x| x.to_integer()).collect())
    }

    /// Keeps the primitive vectors among `points` (frame coordinates).
    /// Points outside the lattice and zero are dropped.
    pub fn primitive_filter(&self, points: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        points
            .iter()
            .filter(|y| self.coefficients_of(y).is_some_and(|c| matrix::gcd_big(&c).is_one()))
            .cloned()
            .collect()
    }
}

/// `sqrt(Gram(v, w))`, kept as its exact square plus an enclosure.
#[derive(Clone, Debug)]
pub struct WedgeNorm {
    pub gram: PowerSum,
}

impl WedgeNorm {
    pub fn to_interval(&self, prec: u32) -> crate::scalar::Interval {
        self.gram.to_interval(prec).sqrt()
    }

    /// Exact value when the Gram determinant is a rational square.
    pub fn exact(&self) -> Option<Rational> {
        let g = self.gram.as_rational()?;
        let n = g.numer().sqrt();
        let d = g.denom().sqrt();
        (&n * &n == *g.numer() && &d * &d == *g.denom()).then(|| Rational::new(n, d))
    }
}

/// `||v ^ w||` for vectors given in frame coordinates of `lat`.
pub fn wedge_norm(lat: &Lattice, v: &[Rational], w: &[Rational]) -> Result<WedgeNorm> {
    if matrix::rank(&[v.to_vec(), w.to_vec()]) < 2 {
        return Err(Error::DependentVectors);
    }
    let vv = lat.norm_sq(v)?;
    let ww = lat.norm_sq(w)?;
    let vw = lat.inner(v, w)?;
    let gram = vv.mul(&ww)?.sub(&vw.mul(&vw)?)?;
    Ok(WedgeNorm { gram })
}

/// Wedge norm of plain rational vectors.
pub fn wedge_covolume(v: &[Rational], w: &[Rational]) -> Result<WedgeNorm> {
    if v.len() != w.len() {
        return Err(Error::invalid("vector lengths differ"));
    }
    let lat = Lattice { scales: vec![PowerScalar::one(); v.len()], frame: vec![vec![Rational::zero()]; v.len()] };
    wedge_norm(&lat, v, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational::{int, rat};

    fn q(rows: &[&[i64]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn covolume_examples() {
        assert_eq!(Lattice::integer_standard(2).covolume().unwrap(), PowerScalar::one());
        let l = Lattice::from_rational(vec![vec![int(2), int(0)], vec![int(0), rat(1, 2)]]).unwrap();
        assert_eq!(l.covolume().unwrap(), PowerScalar::one());
        let l = Lattice::from_rational(q(&[&[1, 1], &[0, 3]])).unwrap();
        assert_eq!(l.covolume().unwrap(), PowerScalar::from_int(3));
        assert_eq!(Lattice::from_rational(q(&[&[1, 2], &[2, 4]])), Err(Error::DependentVectors));
    }

    #[test]
    fn dual_examples() {
        let z = Lattice::integer_standard(3);
        assert!(z.dual().unwrap().same_lattice(&z).unwrap());
        let l = Lattice::from_rational(vec![vec![int(2), int(0)], vec![int(0), rat(1, 2)]]).unwrap();
        let want = Lattice::from_rational(vec![vec![rat(1, 2), int(0)], vec![int(0), int(2)]]).unwrap();
        assert!(l.dual().unwrap().same_lattice(&want).unwrap());
    }

    #[test]
    fn wedge_examples() {
        let w = wedge_covolume(&[int(1), int(0), int(0)], &[int(0), int(1), int(0)]).unwrap();
        assert_eq!(w.exact(), Some(int(1)));
        let w = wedge_covolume(&[int(1), int(0)], &[int(1), int(2)]).unwrap();
        assert_eq!(w.exact(), Some(int(2)));
        // Gram oracle: (9+1+4)(1+1) - (3+1)^2 = 12
        let w = wedge_covolume(&[int(3), int(1), int(2)], &[int(1), int(1), int(0)]).unwrap();
        let gram_oracle = int((9 + 1 + 4) * (1 + 1) - (3 + 1) * (3 + 1));
        assert_eq!(w.gram.as_rational(), Some(gram_oracle));
        assert!(w.exact().is_none());
        assert!(matches!(wedge_covolume(&[int(1), int(2)], &[int(2), int(4)]), Err(Error::DependentVectors)));
    }
}
