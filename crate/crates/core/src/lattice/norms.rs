//! Norms of dual functionals against boxes.

use std::cmp::Ordering;

use num_traits::Zero;

use super::Lattice;
use crate::error::{Error, Result};
use crate::scalar::{PowerScalar, PowerSum, Rational};

/// `phi = sum x_i e_i^*`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFunctional {
    pub coords: Vec<PowerScalar>,
}

impl DualFunctional {
    pub fn new(coords: Vec<PowerScalar>) -> Self {
        DualFunctional { coords }
    }

    pub fn from_rationals(x: &[Rational]) -> Self {
        Self::new(x.iter().cloned().map(PowerScalar::rational).collect())
    }

    /// Functional of a dual-lattice point given in the dual's frame coordinates.
    pub fn from_dual_point(dual: &Lattice, frame: &[Rational]) -> Self {
        Self::new(dual.coords(frame))
    }

    /// `phi(v)` for `v` given in frame coordinates of `lat`.
    pub fn pair(&self, lat: &Lattice, y: &[Rational]) -> Result<PowerSum> {
        let mut acc = PowerSum::zero();
        for ((x, s), v) in self.coords.iter().zip(lat.scales()).zip(y) {
            if v.is_zero() || x.is_zero() {
                continue;
            }
            acc.add_power(&x.mul(s)?.scale(v))?;
        }
        Ok(acc)
    }
}

fn check(phi: &DualFunctional, r: &[PowerScalar]) -> Result<()> {
    if phi.coords.len() != r.len() {
        return Err(Error::invalid("functional and radii differ in length"));
    }
    Ok(())
}

/// `||phi||_r = max_i r_i |x_i|`.
pub fn weighted_sup_norm(phi: &DualFunctional, r: &[PowerScalar]) -> Result<PowerScalar> {
    check(phi, r)?;
    let mut best = PowerScalar::zero();
    for (x, ri) in phi.coords.iter().zip(r) {
        let t = x.abs().mul(ri)?;
        if t.cmp_exact(&best) == Ordering::Greater {
            best = t;
        }
    }
    Ok(best)
}

/// `||phi||_{M_r} = sup_{v in M_r} |phi(v)| = sum_i r_i |x_i|`.
pub fn box_dual_norm(phi: &DualFunctional, r: &[PowerScalar]) -> Result<PowerSum> {
    check(phi, r)?;
    let mut acc = PowerSum::zero();
    for (x, ri) in phi.coords.iter().zip(r) {
        acc.add_power(&x.abs().mul(ri)?)?;
    }
    Ok(acc)
}
