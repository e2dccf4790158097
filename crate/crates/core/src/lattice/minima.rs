//! Successive minima, shortest vectors and the `K_eps` predicates.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::enumerate::Enumerator;
use super::matrix::RankTracker;
use super::{Lattice, WeightedBox};
use crate::error::{Error, Result};
use crate::scalar::{rat, Cmp3, Interval, PowerScalar, PowerSum, Rational, Verdict};

/// A nonzero lattice point with cached geometry.
#[derive(Clone, Debug)]
pub struct FoundPoint {
    /// echelon coefficients
    pub echelon: Vec<i64>,
    /// frame coordinates `y` (the vector is `diag(s) y`)
    pub frame: Vec<Rational>,
}

/// Nonzero points of `lat` in box `k`.
pub fn nonzero_points(e: &Enumerator, k: &WeightedBox) -> Result<Vec<FoundPoint>> {
    let mut out = Vec::new();
    e.for_each(k, |c| {
        if c.iter().any(|&x| x != 0) {
            out.push(FoundPoint { echelon: c.to_vec(), frame: Vec::new() });
        }
    })?;
    for p in out.iter_mut() {
        p.frame = e.frame_of(&p.echelon);
    }
    Ok(out)
}

fn cmp_sums(a: &(PowerSum, Interval), b: &(PowerSum, Interval)) -> Ordering {
    match a.1.compare(&b.1) {
        Cmp3::Less => Ordering::Less,
        Cmp3::Greater => Ordering::Greater,
        _ => a.0.cmp(&b.0).unwrap_or(Ordering::Equal),
    }
}

fn cmp_powers(a: &(PowerScalar, Interval), b: &(PowerScalar, Interval)) -> Ordering {
    match a.1.compare(&b.1) {
        Cmp3::Less => Ordering::Less,
        Cmp3::Greater => Ordering::Greater,
        _ => a.0.cmp_exact(&b.0),
    }
}

/// Rational upper bound on `x^(1/n)` for a positive scalar.
fn root_upper(x: &PowerScalar, n: u32) -> Rational {
    let iv = x.to_interval(64);
    crate::scalar::interval::root_bound(&iv.hi, n, 64, true)
}

/// `lambda_1 <= ... <= lambda_D` for the box `k`, exact.
///
/// Points of `mu K` are enumerated for doubling `mu` until they span; the
/// minima are then read off by a greedy rank sweep over the sorted box norms.
pub fn successive_minima(lat: &Lattice, k: &WeightedBox) -> Result<Vec<PowerScalar>> {
    successive_minima_with(&Enumerator::new(lat), lat, k)
}

pub fn successive_minima_with(e: &Enumerator, lat: &Lattice, k: &WeightedBox) -> Result<Vec<PowerScalar>> {
    let d = lat.rank();
    // start near the volume heuristic (cov / vol)^(1/D)
    let mut mu = if lat.is_full_rank() {
        let ratio = lat.covolume()?.div(&k.volume()?)?;
        let g = root_upper(&ratio, d as u32);
        // round to a power of two below
        let bits = g.numer().bits() as i64 - g.denom().bits() as i64 - 1;
        if bits >= 0 {
            Rational::from_integer(BigInt::from(1) << bits as u64)
        } else {
            Rational::new(1.into(), BigInt::from(1) << (-bits) as u64)
        }
    } else {
        rat(1, 1)
    };
    loop {
        let kb = k.scaled(&PowerScalar::rational(mu.clone()))?;
        let pts = nonzero_points(e, &kb)?;
        let mut t = RankTracker::new();
        for p in &pts {
            t.insert(&p.frame);
        }
        if t.rank() == d {
            let mut normed = pts
                .into_iter()
                .map(|p| {
                    let n = lat.box_norm(&p.frame, k)?;
                    let iv = n.to_interval(96);
                    Ok(((n, iv), p))
                })
                .collect::<Result<Vec<_>>>()?;
            normed.sort_by(|a, b| cmp_powers(&a.0, &b.0));
            let mut t = RankTracker::new();
            let mut out = Vec::with_capacity(d);
            for ((n, _), p) in normed {
                if t.insert(&p.frame) {
                    out.push(n);
                    if out.len() == d {
                        break;
                    }
                }
            }
            return Ok(out);
        }
        mu *= rat(2, 1);
    }
}

/// Euclidean successive minima, squared.
pub fn euclidean_minima_sq(lat: &Lattice) -> Result<Vec<PowerSum>> {
    let e = Enumerator::new(lat);
    let d = lat.rank();
    let dim = lat.dim();
    let mut rho = rat(1, 1);
    if lat.is_full_rank() {
        rho = root_upper(&lat.covolume()?, d as u32);
    }
    loop {
        let kb = WeightedBox::cube(dim, PowerScalar::rational(rho.clone()))?;
        let pts = nonzero_points(&e, &kb)?;
        let r2 = PowerSum::from_rational(&rho * &rho);
        // only points inside the inscribed ball are certified complete
        let mut inside = Vec::new();
        for p in pts {
            let n = lat.norm_sq(&p.frame)?;
            if n.cmp(&r2)? != Ordering::Greater {
                let iv = n.to_interval(96);
                inside.push(((n, iv), p));
            }
        }
        let mut t = RankTracker::new();
        for (_, p) in &inside {
            t.insert(&p.frame);
        }
        if t.rank() == d {
            inside.sort_by(|a, b| cmp_sums(&a.0, &b.0));
            let mut t = RankTracker::new();
            let mut out = Vec::new();
            for ((n, _), p) in inside {
                if t.insert(&p.frame) {
                    out.push(n);
                    if out.len() == d {
                        break;
                    }
                }
            }
            return Ok(out);
        }
        rho *= rat(2, 1);
    }
}

/// Shortest nonzero vector in the Euclidean norm.
#[derive(Clone, Debug)]
pub struct Shortest {
    pub frame: Vec<Rational>,
    /// coefficients in the lattice basis, sign normalized
    pub coeffs: Vec<BigInt>,
    pub norm_sq: PowerSum,
}

fn normalize_sign(c: &mut [BigInt], y: &mut [Rational]) {
    if let Some(last) = c.iter().rev().find(|x| !x.is_zero()) {
        if last.is_negative() {
            c.iter_mut().for_each(|x| *x = -x.clone());
            y.iter_mut().for_each(|x| *x = -x.clone());
        }
    }
}

/// Exact Euclidean minimum. Ties are broken by sign normalization (last
/// nonzero basis coefficient positive) and then lexicographic coefficients.
pub fn shortest_vector(lat: &Lattice) -> Result<Shortest> {
    let e = Enumerator::new(lat);
    let dim = lat.dim();
    let mut rho = if lat.is_full_rank() { root_upper(&lat.covolume()?, dim as u32) } else { rat(1, 1) };
    // a nonzero point exists in the cube of side 2 cov^(1/D)
    let first = loop {
        let pts = nonzero_points(&e, &WeightedBox::cube(dim, PowerScalar::rational(rho.clone()))?)?;
        if !pts.is_empty() {
            break pts;
        }
        rho *= rat(2, 1);
    };
    let mut best = lat.norm_sq(&first[0].frame)?;
    for p in &first[1..] {
        let n = lat.norm_sq(&p.frame)?;
        if n.cmp(&best)? == Ordering::Less {
            best = n;
        }
    }
    let r = best.to_interval(64).sqrt().hi;
    let pts = nonzero_points(&e, &WeightedBox::cube(dim, PowerScalar::rational(r))?)?;
    let mut winner: Option<Shortest> = None;
    for p in pts {
        let n = lat.norm_sq(&p.frame)?;
        if n.cmp(&best)? != Ordering::Equal {
            continue;
        }
        let mut coeffs = e.basis_coeffs_of(&p.echelon);
        let mut frame = p.frame.clone();
        normalize_sign(&mut coeffs, &mut frame);
        let better = match &winner {
            None => true,
            Some(w) => coeffs < w.coeffs,
        };
        if better {
            winner = Some(Shortest { frame, coeffs, norm_sq: n });
        }
    }
    winner.ok_or_else(|| Error::invalid("shortest vector search found no candidate"))
}

/// `Lambda in K_eps`: every nonzero vector has length `>= eps`.
pub fn in_k_eps(lat: &Lattice, eps: &PowerScalar) -> Result<Verdict> {
    lat.require_unimodular()?;
    in_k_eps_unchecked(lat, eps)
}

/// Same predicate without the unimodularity guard.
pub fn in_k_eps_unchecked(lat: &Lattice, eps: &PowerScalar) -> Result<Verdict> {
    let e = Enumerator::new(lat);
    in_k_eps_with(&e, lat, eps)
}

pub fn in_k_eps_with(e: &Enumerator, lat: &Lattice, eps: &PowerScalar) -> Result<Verdict> {
    if eps.signum() != Ordering::Greater {
        return Ok(Verdict::In);
    }
    let dim = lat.dim();
    let eps2 = PowerSum::from_power(&eps.mul(eps)?);
    let mut verdict = Verdict::In;
    for p in nonzero_points(e, &WeightedBox::cube(dim, eps.clone())?)? {
        let n = lat.norm_sq(&p.frame)?;
        match n.sub(&eps2)?.sign() {
            Cmp3::Less => return Ok(Verdict::Out),
            Cmp3::Uncertain => verdict = Verdict::Uncertain,
            _ => {}
        }
    }
    Ok(verdict)
}

/// `Lambda in K*_eps`: every nonzero dual vector has length `>= eps`.
pub fn in_k_eps_dual(lat: &Lattice, eps: &PowerScalar) -> Result<Verdict> {
    lat.require_unimodular()?;
    in_k_eps_unchecked(&lat.dual()?, eps)
}

/// Minkowski's first theorem bound on the sup-norm minimum of a unimodular
/// lattice is 1; in the Euclidean norm it is `sqrt(D)`.
pub fn minkowski_first_bound_sq(dim: usize) -> Rational {
    rat(dim as i64, 1)
}

pub fn abs_max(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::identity;
    use crate::scalar::rational::int;

    fn box_of(r: &[Rational]) -> WeightedBox {
        WeightedBox::from_rationals(r).unwrap()
    }

    #[test]
    fn minima_examples() {
        let z2 = Lattice::integer_standard(2);
        let m = successive_minima(&z2, &box_of(&[int(2), rat(1, 2)])).unwrap();
        assert_eq!(m, vec![PowerScalar::rational(rat(1, 2)), PowerScalar::from_int(2)]);
        let m = successive_minima(&Lattice::integer_standard(4), &box_of(&vec![int(1); 4])).unwrap();
        assert!(m.iter().all(|x| *x == PowerScalar::one()));
        let l = Lattice::from_rational(vec![vec![int(3), int(0)], vec![int(0), rat(1, 3)]]).unwrap();
        let m = successive_minima(&l, &box_of(&[int(1), int(1)])).unwrap();
        assert_eq!(m, vec![PowerScalar::rational(rat(1, 3)), PowerScalar::from_int(3)]);
    }

    #[test]
    fn k_eps_examples() {
        let z = Lattice::integer_standard(3);
        assert_eq!(in_k_eps(&z, &PowerScalar::rational(rat(1, 2))).unwrap(), Verdict::In);
        assert_eq!(in_k_eps(&z, &PowerScalar::from_int(2)).unwrap(), Verdict::Out);
        let l = Lattice::from_rational(vec![vec![rat(1, 4), int(0)], vec![int(0), int(4)]]).unwrap();
        assert_eq!(in_k_eps(&l, &PowerScalar::rational(rat(1, 2))).unwrap(), Verdict::Out);
        assert_eq!(in_k_eps_dual(&l, &PowerScalar::rational(rat(1, 2))).unwrap(), Verdict::Out);
        let two = Lattice::from_rational(vec![vec![int(2), int(0)], vec![int(0), int(1)]]).unwrap();
        assert!(matches!(in_k_eps(&two, &PowerScalar::one()), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn shortest_in_irrational_lattice() {
        // diag(2^(1/2), 2^(-1/2)) Z^2: shortest is (0, 2^(-1/2)), norm^2 = 1/2
        let s = vec![PowerScalar::new(int(1), 2, rat(1, 2)).unwrap(), PowerScalar::new(int(1), 2, rat(-1, 2)).unwrap()];
        let l = Lattice::new(s, identity(2)).unwrap();
        let sv = shortest_vector(&l).unwrap();
        assert_eq!(sv.norm_sq.as_rational(), Some(rat(1, 2)));
        assert_eq!(sv.coeffs, vec![BigInt::from(0), BigInt::from(1)]);
    }
}
