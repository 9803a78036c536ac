use num_integer::Integer;
use proptest::prelude::*;

use torus_mm::constants::CoarseConstants;
use torus_mm::projection::{annular_distance, annular_distance_in, behrstock_gap, frame, marking_annular_distance};
use torus_mm::sample::Sampler;
use torus_mm::{Mat2, Slope};

fn slope(h: i64) -> impl Strategy<Value = Slope> {
    (-h..=h, 0..=h).prop_filter_map("coprime", |(p, q)| (p.gcd(&q) == 1 && (q > 0 || p == 1)).then(|| Slope::new(p, q).unwrap()))
}

fn sl2z() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(-2i64..=2, 0..4).prop_map(|es| {
        let s = Mat2::new(0, -1, 1, 0).unwrap();
        es.iter().fold(Mat2::identity(), |m, &e| m.mul(&Mat2::new(1, e, 0, 1).unwrap()).mul(&s))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn diameter_convention(g in slope(30), x in slope(30)) {
        prop_assume!(g != x);
        prop_assert_eq!(annular_distance(&g, &x, &x).unwrap(), 1);
    }

    #[test]
    fn frame_independence(g in slope(30), x in slope(30), y in slope(30), shift in -6i64..=6) {
        prop_assume!(g != x && g != y);
        let f = frame(&g);
        let a = annular_distance_in(&f, &x, &y).unwrap() as i64;
        let b = annular_distance_in(&f.shifted(shift), &x, &y).unwrap() as i64;
        prop_assert!((a - b).abs() <= 1, "{} vs {}", a, b);
    }

    #[test]
    fn equivariance(m in sl2z(), g in slope(20), x in slope(20), y in slope(20)) {
        prop_assume!(g != x && g != y);
        let a = annular_distance(&g, &x, &y).unwrap() as i64;
        let b = annular_distance(&m.apply(&g).unwrap(), &m.apply(&x).unwrap(), &m.apply(&y).unwrap()).unwrap() as i64;
        prop_assert!((a - b).abs() <= 1, "{} vs {}", a, b);
    }

    #[test]
    fn twist_growth(g in slope(30), x in slope(30), n in -60i64..=60) {
        prop_assume!(g != x);
        let y = frame(&g).dehn_twist().pow(n).apply(&x).unwrap();
        let d = annular_distance(&g, &y, &x).unwrap() as i64;
        prop_assert!((d - n.abs()).abs() <= 1);
    }
}

#[test]
fn lipschitz_on_random_markings() {
    let mut smp = Sampler::new(9, 1);
    for _ in 0..300 {
        let m = smp.marking(30);
        let g = smp.slope(30);
        for n in m.elementary_moves() {
            assert!(marking_annular_distance(&g, &m, &n) <= 4, "{m} {n} {g}");
        }
    }
}

#[test]
fn behrstock_with_frozen_constant() {
    let b0 = CoarseConstants::frozen().int("B0").unwrap();
    let mut smp = Sampler::new(9, 2);
    let mut n = 0;
    while n < 2000 {
        let (a, b, x) = (smp.slope(50), smp.slope(50), smp.slope(50));
        if a == b || b == x || a == x {
            continue;
        }
        let (p, q) = behrstock_gap(&a, &b, &x).unwrap();
        assert!(p.min(q) <= b0, "{a} {b} {x}: {p} {q}");
        n += 1;
    }
}
