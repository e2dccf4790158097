use std::cmp::Ordering;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use sll_core::flow::{approximation_profile, flow_matrix, orbit_lattice, systole_trace, FlowTime, WeightVector};
use sll_core::scalar::{int, rat, PowerScalar, PowerSum, Rational};
use sll_core::suite::dani_rational_suite;

fn weights() -> impl Strategy<Value = WeightVector> {
    prop::sample::select(vec![
        vec![rat(1, 2), rat(1, 2)],
        vec![rat(2, 3), rat(1, 3)],
        vec![rat(3, 5), rat(2, 5)],
        vec![rat(1, 2), rat(1, 4), rat(1, 4)],
    ])
    .prop_map(|w| WeightVector::new(w).unwrap())
}

fn point(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..=30, 1i64..=30).prop_map(|(p, q)| rat(p, q)), d)
}

fn w_and_x() -> impl Strategy<Value = (WeightVector, Vec<Rational>)> {
    weights().prop_flat_map(|w| {
        let d = w.d();
        (Just(w), point(d))
    })
}

/// `min_{0<q<T} max_i |q x_i - p_i|^(1/w_i)` in floating point, times `T`.
fn profile_by_scan(x: &[Rational], w: &WeightVector, big_t: u64) -> f64 {
    let mut best = f64::INFINITY;
    for q in 1..big_t {
        let mut m: f64 = 0.0;
        for (xi, wi) in x.iter().zip(w.w()) {
            let y = xi.to_f64().unwrap() * q as f64;
            let dist = (y - y.round()).abs();
            m = m.max(dist.powf(1.0 / wi.to_f64().unwrap()));
        }
        best = best.min(m);
    }
    best * big_t as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbit_lattices_are_unimodular((w, x) in w_and_x(), k in -6i64..=6) {
        let t = FlowTime::new(2, rat(k, 2)).unwrap();
        let lat = orbit_lattice(&x, &w, &t).unwrap();
        prop_assert_eq!(lat.covolume().unwrap().cmp_exact(&PowerScalar::one()), Ordering::Equal);
    }

    #[test]
    fn flow_is_a_homomorphism((w, x) in w_and_x(), a in 0i64..=6, b in 0i64..=6) {
        let ta = FlowTime::new(2, int(a)).unwrap();
        let tb = FlowTime::new(2, int(b)).unwrap();
        let tab = FlowTime::new(2, int(a + b)).unwrap();
        let composed = orbit_lattice(&x, &w, &ta).unwrap().apply_diagonal(&flow_matrix(&w, &tb).unwrap()).unwrap();
        let direct = orbit_lattice(&x, &w, &tab).unwrap();
        prop_assert!(composed.same_lattice(&direct).unwrap());
    }

    #[test]
    fn profile_matches_full_scan((w, x) in w_and_x()) {
        let horizons = [2u64, 5, 11, 23];
        let prof = approximation_profile(&x, &w, &horizons, &rat(1, 2)).unwrap();
        for e in &prof.entries {
            let want = profile_by_scan(&x, &w, e.horizon);
            let got = e.value.to_f64();
            prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "T = {}: {got} vs {want}", e.horizon);
        }
    }

    #[test]
    fn rational_orbits_shrink(seed in any::<u64>()) {
        let out = dani_rational_suite(seed, 2, 12).unwrap();
        prop_assert!(out.passed(), "{:?}", out.failures);
    }
}

#[test]
fn systole_of_a_rational_point_is_bounded_by_its_denominator() {
    // x = (1/3, 2/5) has common denominator 15
    let w = WeightVector::equal(2).unwrap();
    let x = vec![rat(1, 3), rat(2, 5)];
    let ts: Vec<FlowTime> = (0..16).map(|k| FlowTime::new(2, rat(k, 2)).unwrap()).collect();
    for p in systole_trace(&x, &w, &ts).unwrap() {
        let bound = p.t.exp(&int(-1)).unwrap().scale(&int(15));
        let bound_sq = PowerSum::from_power(&bound.mul(&bound).unwrap());
        assert_ne!(p.norm_sq.cmp(&bound_sq).unwrap(), Ordering::Greater, "t = {}", p.t);
    }
}
