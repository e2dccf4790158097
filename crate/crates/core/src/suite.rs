//! Seeded property suites shared by `sll selftest` and the acceptance tests.
//!
//! Every suite draws from one [`Lcg`] and returns a [`SuiteOutcome`] listing
//! failures with enough context to replay them.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::counting::{self, CountingScene};
use crate::error::{Error, Result};
use crate::flow::{self, FlowTime, WeightVector};
use crate::fractal::random_unimodular;
use crate::lattice::minima::successive_minima;
use crate::lattice::{Lattice, WeightedBox};
use crate::rng::Lcg;
use crate::scalar::{format_rational, int, rat, PowerScalar, PowerSum, Rational};

#[derive(Clone, Debug, Default)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        SuiteOutcome { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

/// Rational basis with entries `p/q`, `|p/q| <= 3`, `q <= 4`, redrawn until
/// nonsingular.
pub fn random_lattice(rng: &mut Lcg, dim: usize) -> Lattice {
    loop {
        let m: Vec<Vec<Rational>> = (0..dim).map(|_| (0..dim).map(|_| rng.rational(-3, 3, 4)).collect()).collect();
        if let Ok(l) = Lattice::from_rational(m) {
            return l;
        }
    }
}

/// Box radii in `[1/2, 3]`.
pub fn random_box(rng: &mut Lcg, dim: usize) -> WeightedBox {
    let r = (0..dim)
        .map(|_| {
            let x = rng.rational(0, 3, 4);
            PowerScalar::rational(if x < rat(1, 2) { rat(1, 2) } else { x })
        })
        .collect();
    WeightedBox::new(r).expect("positive radii")
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

/// Dual involution, `cov * cov* = 1` and both sides of Minkowski's second
/// theorem, all exact.
pub fn minkowski_suite(seed: u64, cases: usize, max_dim: usize) -> Result<SuiteOutcome> {
    let mut rng = Lcg::new(seed);
    let mut out = SuiteOutcome::new("minkowski");
    for case in 0..cases {
        let dim = 2 + case % (max_dim - 1);
        let lat = random_lattice(&mut rng, dim);
        let k = random_box(&mut rng, dim);
        let dual = lat.dual()?;
        if !dual.dual()?.same_lattice(&lat)? {
            out.failures.push(format!("case {case}: dual of dual differs"));
        }
        let prod = lat.covolume()?.mul(&dual.covolume()?)?;
        if prod.cmp_exact(&PowerScalar::one()) != Ordering::Equal {
            out.failures.push(format!("case {case}: cov * cov* = {prod}"));
        }
        let minima = successive_minima(&lat, &k)?;
        let mut v = k.volume()?.div(&lat.covolume()?)?;
        for m in &minima {
            v = v.mul(m)?;
        }
        let hi = PowerScalar::rational(crate::scalar::rational::pow_i(&int(2), dim as i64));
        let lo = hi.scale(&factorial(dim).recip());
        if v.cmp_exact(&lo) == Ordering::Less || v.cmp_exact(&hi) == Ordering::Greater {
            out.failures.push(format!("case {case}: product {v} outside [{lo}, {hi}]"));
        }
        out.cases += 1;
    }
    Ok(out)
}

/// Random scene on a unimodular lattice in `R^3`: radii in `1..=4`, last
/// radius 1, `s` in `[1/10, 9/20]`.
pub fn random_scene(rng: &mut Lcg) -> Result<CountingScene> {
    let lat = random_unimodular(rng, 3)?;
    let r = vec![PowerScalar::from_int(rng.range(1, 4)), PowerScalar::from_int(rng.range(1, 4)), PowerScalar::one()];
    let s = rat(rng.range(2, 9), 20);
    CountingScene::new(lat, r, PowerScalar::rational(s))
}

/// v-major and phi-major bad sets agree exactly.
pub fn bad_set_suite(seed: u64, cases: usize, max_predicted: u64) -> Result<SuiteOutcome> {
    let mut rng = Lcg::new(seed);
    let mut out = SuiteOutcome::new("bad_set_orders");
    while out.cases < cases {
        let scene = match random_scene(&mut rng) {
            Ok(s) => s,
            Err(Error::EnumerationBudgetExceeded { .. }) => {
                out.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if scene.predicted_size()? > max_predicted {
            out.skipped += 1;
            continue;
        }
        let a = counting::bad_set(&scene)?;
        let b = counting::bad_set_phi_major(&scene)?;
        if a != b {
            out.failures.push(format!("case {}: {} vs {} points", out.cases, a.len(), b.len()));
        }
        out.cases += 1;
    }
    Ok(out)
}

/// Rational `x` with common denominator `Q <= max_q`: the systole obeys
/// `|a_t h(x) Z^(d+1)| <= Q e^(-t)` on grid times with `e^t > 2Q`, and
/// `D_w(T) = 0` for `T > Q`.
pub fn dani_rational_suite(seed: u64, cases: usize, max_q: i64) -> Result<SuiteOutcome> {
    let mut rng = Lcg::new(seed);
    let mut out = SuiteOutcome::new("dani_rational");
    let weights = [vec![rat(1, 2), rat(1, 2)], vec![rat(2, 3), rat(1, 3)], vec![rat(3, 5), rat(2, 5)]];
    for case in 0..cases {
        let w = WeightVector::new(weights[case % weights.len()].clone())?;
        let q_target = rng.range(1, max_q);
        let x: Vec<Rational> = (0..w.d()).map(|_| rat(rng.range(0, q_target), q_target)).collect();
        let q = x.iter().fold(BigInt::one(), |acc, xi| acc.lcm(xi.denom()));
        let qi: i64 = q.clone().try_into().expect("small denominator");
        // grid times e^t = 2^(k/2) starting near 2Q
        let start = (2.0 * ((2 * qi) as f64).log2()).floor() as i64;
        let ts: Vec<FlowTime> = (start..start + 12).map(|k| FlowTime::new(2, rat(k, 2))).collect::<Result<_>>()?;
        let trace = flow::systole_trace(&x, &w, &ts)?;
        for p in &trace {
            let et = p.t.exp(&int(1))?;
            if et.cmp_exact(&PowerScalar::from_int(2 * qi)) != Ordering::Greater {
                continue;
            }
            let bound = PowerSum::from_power(&et.recip()?.scale(&Rational::from_integer(q.clone())).powi(2)?);
            if p.norm_sq.cmp(&bound)? == Ordering::Greater {
                out.failures.push(format!("case {case}: x = {} at t = {}", show(&x), p.t));
            }
        }
        let horizons: Vec<u64> = (1..=4).map(|k| (qi as u64) * k + 1).collect();
        let prof = flow::approximation_profile(&x, &w, &horizons, &rat(1, 2))?;
        if prof.entries.iter().any(|e| !e.value.is_zero()) {
            out.failures.push(format!("case {case}: D_w(T) nonzero past T = Q for x = {}", show(&x)));
        }
        out.cases += 1;
    }
    Ok(out)
}

fn show(x: &[Rational]) -> String {
    x.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

/// Random weight vector with `l` equal top weights, `d` in `2..=5`.
pub fn random_weights(rng: &mut Lcg) -> WeightVector {
    loop {
        let d = rng.range(2, 5) as usize;
        let l = rng.range(1, d as i64) as usize;
        let top = int(rng.range(5, 12));
        let mut raw = vec![top.clone(); l];
        let mut prev = top.clone() - int(1);
        for _ in l..d {
            let x = rat(rng.range(1, 8), 2).min(prev.clone());
            raw.push(x.clone());
            prev = x;
        }
        let sum: Rational = raw.iter().sum();
        if let Ok(w) = WeightVector::new(raw.into_iter().map(|x| x / &sum).collect()) {
            return w;
        }
    }
}

/// `l - (w_(l+1) + ... + w_d) = l (1 + w_1) - 1` exactly.
pub fn quotient_identity_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = Lcg::new(seed);
    let mut out = SuiteOutcome::new("quotient_identity");
    for case in 0..cases {
        let w = random_weights(&mut rng);
        let l = int(w.ell() as i64);
        let lhs = &l - w.tail_sum();
        let rhs = &l * (int(1) + &w.w()[0]) - int(1);
        if lhs != rhs {
            out.failures.push(format!("case {case}: w = {w}"));
        }
        out.cases += 1;
    }
    out
}

/// `d^2 / (d + 1)` for equal weights, `d = 2..=max_d`.
pub fn equal_weight_dimensions(max_d: usize) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("equal_weight_dimension");
    for d in 2..=max_d {
        let got = crate::fractal::dimension_lower_bound(&WeightVector::equal(d)?);
        let di = d as i64;
        if got != rat(di * di, di + 1) {
            out.failures.push(format!("d = {d}: got {}", format_rational(&got)));
        }
        out.cases += 1;
    }
    Ok(out)
}

/// Primitive count ratio `count * zeta(D) / theta` on the cube of half-width
/// `hw` in `Z^D`.
pub fn zeta_ratio(dim: usize, hw: i64) -> Result<f64> {
    let lat = Lattice::integer_standard(dim);
    let k = WeightedBox::cube(dim, PowerScalar::from_int(hw))?;
    Ok(counting::primitive_count_vs_zeta(&lat, &k)?.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(minkowski_suite(1, 6, 3).unwrap().passed());
        assert!(quotient_identity_suite(2, 20).passed());
        assert!(equal_weight_dimensions(6).unwrap().passed());
        assert!(dani_rational_suite(3, 3, 20).unwrap().passed());
    }

    #[test]
    fn random_weights_have_a_gap() {
        let mut rng = Lcg::new(9);
        for _ in 0..50 {
            let w = random_weights(&mut rng);
            assert!(w.ell() <= w.d());
            assert_eq!(w.w().iter().sum::<Rational>(), Rational::one());
        }
    }
}
