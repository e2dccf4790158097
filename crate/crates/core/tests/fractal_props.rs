use num_traits::One;
use proptest::prelude::*;
use sll_core::flow::{FlowTime, WeightVector};
use sll_core::fractal::{
    condition_check_wedge, cover_count, dimension_lower_bound, expand_tree, tree::lcm_denominator, tree_report,
    ConstructionParams, TimeOffset,
};
use sll_core::rng::Lcg;
use sll_core::scalar::{int, rat, Rational};
use sll_core::suite::random_weights;

fn params() -> impl Strategy<Value = ConstructionParams> {
    (
        prop::sample::select(vec![(3i64, 5i64), (1, 2), (2, 3), (4, 7)]),
        prop::sample::select(vec![2i64, 3]),
        prop::sample::select(vec![rat(1, 2), rat(1, 3), rat(2, 3)]),
        prop::sample::select(vec![rat(1, 4), rat(1, 8), rat(1, 2)]),
    )
        .prop_map(|((a, b), step, eps, r)| {
            let w = WeightVector::new(vec![rat(a, b), rat(b - a, b)]).unwrap();
            let t = FlowTime::new(2, int(step)).unwrap();
            ConstructionParams::new(w, eps, t, r, TimeOffset::grid(int(0))).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn depth_one_trees_are_well_formed(p in params()) {
        let tree = expand_tree(&p, 1, 1_000_000).unwrap();
        let rep = tree_report(&tree).unwrap();
        for key in ["nested", "siblings_disjoint", "anchor_in_window", "parent_links"] {
            prop_assert_eq!(rep.conclusions.get(key), Some(&true), "{}", key);
        }
        if tree.levels[1].is_empty() {
            prop_assert_eq!(tree.level_mass(0), Rational::from_integer(0.into()));
        } else {
            for n in 0..=1 {
                prop_assert!(tree.level_mass(n).is_one());
            }
            prop_assert!(cover_count(&tree, 0).unwrap() <= cover_count(&tree, 1).unwrap());
        }
        for &i in &tree.levels[1] {
            let node = &tree.nodes[i];
            prop_assert_eq!(&lcm_denominator(&node.tau), &node.q);
            prop_assert!(condition_check_wedge(&node.tau, 1, &p).unwrap().accepted());
        }
    }

    #[test]
    fn dimension_bound_sits_below_d(seed in any::<u64>()) {
        let w = random_weights(&mut Lcg::new(seed));
        let d = int(w.d() as i64);
        let s = dimension_lower_bound(&w);
        prop_assert_eq!(s.clone(), &d - (int(1) + &w.w()[0]).recip());
        prop_assert!(&d - int(1) < s && s < d);
    }
}
