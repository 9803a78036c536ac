use torus_mm::constants::CoarseConstants;
use torus_mm::farey::farey_distance;
use torus_mm::hierarchy::{build_hierarchy_path, candidate_annuli};
use torus_mm::machinery::*;
use torus_mm::projection::{frame, marking_annular_distance, marking_projection};
use torus_mm::Slope;

#[test]
fn cutoff_monotone_and_antitone() {
    for m in 0..12 {
        for n in 0..30 {
            assert!(cutoff(n, m) <= cutoff(n + 1, m));
            assert!(cutoff(n, m + 1) <= cutoff(n, m));
        }
    }
}

#[test]
fn raising_threshold_never_raises_total() {
    for (a, b) in corpus(5, 1, 200, 40) {
        let totals: Vec<u64> = (0..10).map(|t| distance_formula(&a, &b, t).total()).collect();
        assert!(totals.windows(2).all(|w| w[1] <= w[0]), "{a} {b}: {totals:?}");
    }
}

#[test]
fn whole_surface_term_tracks_path_length() {
    let c = CoarseConstants::frozen();
    let (c1, c2, k) = (c.value("c1_S").unwrap(), c.value("c2_S").unwrap(), c.int("K").unwrap());
    // the calibration corpus and a fresh one
    for (stream, n) in [(STREAM_BOUNDED, 100), (106, 60)] {
        for (a, b) in bounded_corpus(2024, stream, n, 40, k).unwrap() {
            let h = build_hierarchy_path(&a, &b).unwrap();
            let s = farey_distance(&a.base(), &b.base()) as f64;
            assert!(coarse_equal(s, h.len() as f64, c1, c2), "{a} {b}: {s} vs {}", h.len());
        }
    }
}

#[test]
fn bounded_endpoints_keep_the_path_bounded() {
    // d_γ(ρ(i), ρ(j)) < K + 2 M2 whenever d_γ(ρ(0), ρ(end)) < K
    let c = CoarseConstants::frozen();
    let (k, m2) = (c.int("K").unwrap(), c.int("M2").unwrap());
    for (a, b) in bounded_corpus(2024, 107, 40, 40, k).unwrap() {
        let h = build_hierarchy_path(&a, &b).unwrap();
        let mut cores: Vec<Slope> = candidate_annuli(&a, &b).unwrap().into_iter().collect();
        cores.extend(h.main_geodesic.iter().copied());
        for g in cores {
            if marking_annular_distance(&g, &a, &b) >= k {
                continue;
            }
            let f = frame(&g);
            let coords: Vec<i64> = h.steps.iter().flat_map(|m| marking_projection(&f, m)).collect();
            let spread = (coords.iter().max().unwrap() - coords.iter().min().unwrap()) as u64 + 1;
            assert!(spread < k + 2 * m2, "{a} {b} about {g}: {spread}");
        }
    }
}

#[test]
fn only_geodesic_annuli_exceed_five() {
    assert!(finite_support_search(31, 1, 3000, 40, 6).unwrap().is_empty());
    assert!(finite_support_search(31, 2, 3000, 10, 6).unwrap().is_empty());
}
