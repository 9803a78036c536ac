use num_integer::Integer;
use proptest::prelude::*;

use torus_mm::constants::CoarseConstants;
use torus_mm::hierarchy::{build_hierarchy_path, check_hierarchy_axioms};
use torus_mm::marking::{marking_distance, marking_distance_bfs};
use torus_mm::{Mat2, Marking, Slope};

fn marking(h: i64) -> impl Strategy<Value = Marking> {
    (-h..=h, 0..=h, any::<prop::sample::Index>()).prop_filter_map("coprime", move |(p, q, i)| {
        if p.gcd(&q) != 1 || (q == 0 && p != 1) {
            return None;
        }
        let b = Slope::new(p, q).unwrap();
        let n = b.neighbors_within(h);
        Some(Marking::new(b, n[i.index(n.len())]).unwrap())
    })
}

fn sl2z() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(-2i64..=2, 0..4).prop_map(|es| {
        let s = Mat2::new(0, -1, 1, 0).unwrap();
        es.iter().fold(Mat2::identity(), |m, &e| m.mul(&Mat2::new(1, e, 0, 1).unwrap()).mul(&s))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distance_is_invariant(m in sl2z(), a in marking(30), b in marking(30)) {
        let d = marking_distance(&a, &b).unwrap();
        prop_assert_eq!(marking_distance(&a.apply(&m).unwrap(), &b.apply(&m).unwrap()).unwrap(), d);
    }

    #[test]
    fn formula_matches_bfs(a in marking(6), b in marking(6)) {
        let d = marking_distance(&a, &b).unwrap();
        prop_assume!(d <= 14);
        prop_assert_eq!(marking_distance_bfs(&a, &b, 1_000_000).unwrap(), d);
    }

    #[test]
    fn hierarchy_paths_pass_with_frozen_constants(a in marking(40), b in marking(40)) {
        let hc = CoarseConstants::frozen().hierarchy().unwrap();
        let h = build_hierarchy_path(&a, &b).unwrap();
        let r = check_hierarchy_axioms(&h, &hc).unwrap();
        prop_assert!(r.passed(), "{}", r);
        prop_assert_eq!(h.len() as u64 >= marking_distance(&a, &b).unwrap(), true);
    }
}
