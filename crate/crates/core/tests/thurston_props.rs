use num_bigint::BigInt;
use proptest::prelude::*;

use torus_mm::thurston::{fixed_points, psi, rho, translation_length, Generator, TwistTuple, TwistWord};

fn word() -> impl Strategy<Value = TwistWord> {
    prop::collection::vec((any::<bool>(), -4i64..=4), 0..8)
        .prop_map(|ls| TwistWord::new(ls.into_iter().map(|(g, e)| (if g { Generator::Alpha } else { Generator::Beta }, e))))
}

fn tuple() -> impl Strategy<Value = TwistTuple> {
    prop::collection::vec(1u64..=6, 1..6).prop_map(|q| TwistTuple::tight(q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn determinant_one(w in word(), k in 1u64..=4) {
        prop_assert_eq!(rho(&w, k).unwrap().det(), BigInt::from(1));
    }

    #[test]
    fn composition(w1 in word(), w2 in word(), k in 1u64..=4) {
        prop_assert_eq!(rho(&w1.concat(&w2), k).unwrap(), rho(&w1, k).unwrap().mul(&rho(&w2, k).unwrap()));
        prop_assert!(rho(&w1.concat(&w1.inverse()), k).unwrap().is_identity());
    }

    #[test]
    fn fixed_points_are_exact_and_periodic(t in tuple(), k in 2u64..=4) {
        let m = psi(&t, k).unwrap();
        let (attr, rep) = fixed_points(&m).unwrap();
        let [a, b, c, d] = m.entries();
        prop_assert_eq!(attr.mobius(a, b, c, d), attr.clone());
        prop_assert_eq!(rep.mobius(a, b, c, d), rep.clone());
        prop_assert!(attr.continued_fraction().is_periodic());
        prop_assert!(rep.continued_fraction().is_periodic());
    }

    #[test]
    fn rotations_have_equal_length(t in tuple(), r in 0usize..6, k in 2u64..=3) {
        let q = t.q();
        let r = r % q.len();
        let rot = TwistTuple::tight([&q[r..], &q[..r]].concat()).unwrap();
        let a = translation_length(&psi(&t, k).unwrap()).unwrap();
        let b = translation_length(&psi(&rot, k).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        prop_assert_eq!(psi(&t, k).unwrap().trace(), psi(&rot, k).unwrap().trace());
    }
}
