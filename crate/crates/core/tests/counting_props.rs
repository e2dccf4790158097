use std::cmp::Ordering;

use proptest::prelude::*;
use sll_core::counting::{self, nq_box, q_thresholds, rank_at, CountingScene};
use sll_core::lattice::{Enumerator, Lattice, WeightedBox};
use sll_core::rng::Lcg;
use sll_core::scalar::{int, rat, PowerScalar};
use sll_core::suite::{bad_set_suite, random_scene};
use sll_core::Error;

fn scene(seed: u64) -> Option<CountingScene> {
    let mut rng = Lcg::new(seed);
    match random_scene(&mut rng) {
        Ok(s) => Some(s),
        Err(Error::EnumerationBudgetExceeded { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nq_counts_grow_with_q(seed in any::<u64>(), a in 1i64..=6, b in 1i64..=6) {
        let Some(s) = scene(seed) else { return Ok(()) };
        let (lo, hi) = (a.min(b), a.max(b));
        let e = Enumerator::new(s.dual());
        let c_lo = e.count(&nq_box(&s, &PowerScalar::from_int(lo)).unwrap()).unwrap();
        let c_hi = e.count(&nq_box(&s, &PowerScalar::from_int(hi)).unwrap()).unwrap();
        prop_assert!(c_lo <= c_hi);
    }

    #[test]
    fn thresholds_are_ordered_and_reach_their_rank(seed in any::<u64>()) {
        let Some(s) = scene(seed) else { return Ok(()) };
        let th = q_thresholds(&s).unwrap();
        let finite: Vec<&PowerScalar> = th.values.iter().flatten().collect();
        for w in finite.windows(2) {
            prop_assert_ne!(w[0].cmp_exact(w[1]), Ordering::Greater);
        }
        // a missing threshold is never followed by a finite one
        let first_none = th.values.iter().position(|v| v.is_none()).unwrap_or(th.values.len());
        prop_assert!(th.values[first_none..].iter().all(|v| v.is_none()));
        for (k, q) in finite.iter().enumerate() {
            prop_assert!(rank_at(&s, q).unwrap() > k);
            // just below q_k the rank has not yet reached k + 1
            let below = q.scale(&rat(999, 1000));
            prop_assert!(rank_at(&s, &below).unwrap() <= k);
        }
    }

    #[test]
    fn bad_set_orders_agree(seed in any::<u64>()) {
        let out = bad_set_suite(seed, 2, 5_000).unwrap();
        prop_assert!(out.passed(), "{:?}", out.failures);
    }
}

#[test]
fn scaled_integer_lattice_thresholds() {
    // dual of 4 Z^3 is (1/4) Z^3
    let lat = Lattice::from_rational(vec![
        vec![int(4), int(0), int(0)],
        vec![int(0), int(4), int(0)],
        vec![int(0), int(0), int(4)],
    ])
    .unwrap();
    let s = CountingScene::new(lat, vec![PowerScalar::one(); 3], PowerScalar::rational(rat(1, 4))).unwrap();
    let th = q_thresholds(&s).unwrap();
    // with unit radii the whole dual basis enters N_q at q = 1/4
    assert_eq!(th.values, vec![Some(PowerScalar::rational(rat(1, 4))); 3]);
    let bad = counting::bad_set(&s).unwrap();
    assert_eq!(bad, counting::bad_set_phi_major(&s).unwrap());
    let k = WeightedBox::cube(3, PowerScalar::one()).unwrap();
    assert_eq!(Enumerator::new(s.dual()).count(&k).unwrap(), 9 * 9 * 9);
}
