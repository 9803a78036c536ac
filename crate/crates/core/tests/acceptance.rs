//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain
//! binary (`harness = false`) so the lines are always printed.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rayon::prelude::*;

use torus_mm::constants::CoarseConstants;
use torus_mm::hierarchy::{build_hierarchy_path, check_hierarchy_axioms};
use torus_mm::machinery::*;
use torus_mm::marking::{marking_distance, marking_distance_bfs, Marking};
use torus_mm::orbits::{enumerate_classes, growth_rate, necklace_count};
use torus_mm::projection::{annular_distance, frame, marking_annular_distance_in, AnnularFrame};
use torus_mm::sample::Sampler;
use torus_mm::thurston::{all_tuples, cf_bound_certificate, free_group_check, psi};
use torus_mm::Slope;

const SEED: u64 = 2024;
// verification streams; calibration uses 1..=6
const S_FORMULA: u64 = 101;
const S_HIERARCHY: u64 = 102;
const S_BOUNDED: u64 = 103;
const S_LIPSCHITZ: u64 = 104;
const S_TWIST: u64 = 105;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn verdict(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

// ---- oracles -------------------------------------------------------------

type M = [[i128; 2]; 2];

fn mul(a: M, b: M) -> M {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// `τ_α^q τ_β^{-q}` with `τ_α = [[1,k],[0,1]]`, `τ_β = [[1,0],[-k,1]]`.
fn block(k: i128, q: i128) -> M {
    mul([[1, k * q], [0, 1]], [[1, 0], [k * q, 1]])
}

fn psi_i128(q: &[u64], k: i128) -> M {
    q.iter().fold([[1, 0], [0, 1]], |m, &x| mul(m, block(k, x as i128)))
}

/// Entries (preperiod and period) of the continued fraction of `(P + √D)/Q`,
/// by the classical recurrence on `(P, Q)` pairs.
fn quadratic_cf(p: BigInt, d: BigInt, q: BigInt) -> Vec<BigInt> {
    // make Q | D - P^2
    let (mut p, d, mut q) = if (&d - &p * &p).is_multiple_of(&q) {
        (p, d, q)
    } else {
        let a = q.abs();
        (&p * &a, &d * &a * &a, &q * &a)
    };
    let s = d.sqrt();
    let mut seen: BTreeMap<(BigInt, BigInt), usize> = BTreeMap::new();
    let mut out = Vec::new();
    loop {
        if seen.insert((p.clone(), q.clone()), out.len()).is_some() {
            return out;
        }
        // floor((P + √D)/Q); for Q < 0 the irrational part needs rounding up
        let num = if q.is_positive() { &p + &s } else { &p + &s + 1 };
        let a = num.div_floor(&q);
        let p2 = &a * &q - &p;
        let q2 = (&d - &p2 * &p2) / &q;
        out.push(a);
        p = p2;
        q = q2;
    }
}

fn min_rotation(t: &[u64]) -> Vec<u64> {
    (0..t.len()).map(|r| [&t[r..], &t[..r]].concat()).min().unwrap()
}

// ---- criteria ------------------------------------------------------------

fn trace_positivity() -> Outcome {
    let mut checked = 0usize;
    for k in [2u64, 3, 4] {
        for n in 1..=6 {
            for t in all_tuples(n, 5) {
                let m = psi(&t, k).unwrap();
                let o = psi_i128(t.q(), k as i128);
                let tr = o[0][0] + o[1][1];
                if m.trace() != BigInt::from(tr) || tr <= 2 {
                    return verdict(false, format!("k={k} tuple {t}: trace {} (oracle {tr})", m.trace()));
                }
                checked += 1;
            }
        }
    }
    pass(format!("{checked} tuples, traces match the i128 oracle and exceed 2"))
}

fn freeness() -> Outcome {
    // independent exhaustive search with i128 matrices
    let k: i128 = 2;
    let exps = [-3i128, -2, -1, 1, 2, 3];
    let letter = |g: usize, e: i128| -> M {
        if g == 0 {
            [[1, k * e], [0, 1]]
        } else {
            [[1, 0], [-k * e, 1]]
        }
    };
    let mut relation = None;
    let mut words = 0usize;
    // (matrix, next generator) frontier over reduced words
    let mut frontier: Vec<(M, usize)> = vec![([[1, 0], [0, 1]], 0), ([[1, 0], [0, 1]], 1)];
    for len in 1..=6 {
        let mut next = Vec::with_capacity(frontier.len() * 6);
        for (m, g) in &frontier {
            for &e in &exps {
                let w = mul(*m, letter(*g, e));
                words += 1;
                if w == [[1, 0], [0, 1]] || w == [[-1, 0], [0, -1]] {
                    relation.get_or_insert(len);
                }
                next.push((w, 1 - g));
            }
        }
        frontier = next;
    }
    let lib = free_group_check(2, 6).unwrap();
    let k1 = !free_group_check(1, 6).unwrap();
    verdict(
        lib && relation.is_none() && k1,
        format!("{words} reduced words, oracle relation {relation:?}, library free = {lib}, k = 1 relation found = {k1}"),
    )
}

fn cf_bound() -> Outcome {
    let mut checked = 0usize;
    let mut worst = (0i64, String::new());
    for k in [2u64, 3] {
        for b in 1..=5u64 {
            for n in 1..=5 {
                for t in all_tuples(n, b) {
                    let cert = cf_bound_certificate(&t, k).unwrap();
                    let o = psi_i128(t.q(), k as i128);
                    let (a, c, d) = (o[0][0], o[1][0], o[1][1]);
                    let tr = a + d;
                    // attracting root of c z^2 + (d - a) z - b = 0 for tr > 2
                    let cf = quadratic_cf(BigInt::from(a - d), BigInt::from(tr * tr - 4), BigInt::from(2 * c));
                    let max = cf.iter().max().unwrap().clone();
                    let bound = BigInt::from(k * b);
                    if max != cert.max_entry || max > bound || !cert.ok {
                        return verdict(false, format!("k={k} tuple {t}: oracle max {max}, library {} (bound {bound})", cert.max_entry));
                    }
                    let m: i64 = max.try_into().unwrap();
                    if m > worst.0 {
                        worst = (m, format!("k={k} {t}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    pass(format!("{checked} tuples, largest entry {} at {}", worst.0, worst.1))
}

fn class_counting() -> Outcome {
    for n in 1..=8usize {
        for b in 1..=5u64 {
            let lib = enumerate_classes(n, b, 1 << 20).unwrap();
            let mut brute: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
            for t in all_tuples(n, b) {
                *brute.entry(min_rotation(t.q())).or_default() += 1;
            }
            let got: BTreeMap<Vec<u64>, usize> = lib.iter().map(|c| (c.representative.q().to_vec(), c.multiplicity)).collect();
            let total = (b as f64).powi(n as i32);
            if got != brute || lib.len() != got.len() || (lib.len() as f64) < total / n as f64 {
                return verdict(false, format!("n={n} B={b}: {} classes, brute force {}", lib.len(), brute.len()));
            }
            if necklace_count(n, b).unwrap() != lib.len() as u128 {
                return verdict(false, format!("n={n} B={b}: necklace formula disagrees"));
            }
        }
    }
    pass("n <= 8, B <= 5: classes and multiplicities equal brute-force dedup; count >= B^n/n")
}

fn growth() -> Outcome {
    let est: Vec<f64> = [2u64, 8, 32].iter().map(|&b| growth_rate(b, 10, 2, 1.0, 1 << 22).unwrap().estimate).collect();
    let mono = est[0] < est[1] && est[1] < est[2];
    let mut close = true;
    for b in [2u64, 8, 32] {
        let g = growth_rate(b, 10, 2, 1.0, 0).unwrap();
        let expect = (b as f64).ln() - 10f64.ln() / 10.0;
        close &= (g.lower_bound[9] - expect).abs() < 1e-12;
    }
    // counts behind the estimates against enumeration where it fits
    let mut counts_ok = true;
    for (b, n_max) in [(2u64, 10usize), (8, 6), (32, 4)] {
        for n in 1..=n_max {
            counts_ok &= enumerate_classes(n, b, 1 << 22).unwrap().len() as u128 == necklace_count(n, b).unwrap();
        }
    }
    verdict(
        mono && close && counts_ok,
        format!("p(2) = {:.4}, p(8) = {:.4}, p(32) = {:.4}; closed form matches to 1e-12: {close}; counts match enumeration: {counts_ok}", est[0], est[1], est[2]),
    )
}

fn formula_calibration(frozen: &CoarseConstants) -> Outcome {
    let refit = fit_constants(&FitSpec::default()).unwrap();
    let reproduced = refit.same_values(frozen);
    let hc = frozen.hierarchy().unwrap();
    let pairs = corpus(SEED, S_FORMULA, 500, 40);
    let rows: Vec<(u64, u64, Option<u64>)> = pairs
        .par_iter()
        .map(|(a, b)| {
            let x = distance_formula(a, b, hc.m3).total();
            let y = marking_distance(a, b).unwrap();
            // BFS oracle where it is cheap enough
            let bfs = if y <= 18 { Some(marking_distance_bfs(a, b, 1_000_000).unwrap()) } else { None };
            (x, y, bfs)
        })
        .collect();
    let viol = rows.iter().filter(|r| !coarse_equal(r.0 as f64, r.1 as f64, hc.c1, hc.c2)).count();
    let bfs_checked = rows.iter().filter(|r| r.2.is_some()).count();
    let bfs_bad = rows.iter().filter(|r| r.2.is_some_and(|b| b != r.1)).count();
    verdict(
        reproduced && viol == 0 && bfs_bad == 0,
        format!(
            "refit reproduces frozen constants: {reproduced}; {viol} violations over 500 fresh pairs (c1 = {}, c2 = {}, M3 = {}); BFS agrees on {}/{bfs_checked} pairs",
            hc.c1,
            hc.c2,
            hc.m3,
            bfs_checked - bfs_bad
        ),
    )
}

fn hierarchy(frozen: &CoarseConstants) -> Outcome {
    let hc = frozen.hierarchy().unwrap();
    let pairs = corpus(SEED, S_HIERARCHY, 1000, 40);
    let res: Vec<(bool, usize, usize)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let h = build_hierarchy_path(a, b).unwrap();
            let ok = check_hierarchy_axioms(&h, &hc).unwrap().passed();
            let mut smp = Sampler::new(SEED, S_HIERARCHY * 1000 + i as u64);
            let (mut tried, mut missed) = (0, 0);
            for idx in 0..h.steps.len() {
                let s = h.steps[idx];
                let mut subs: Vec<Marking> = s.elementary_moves().to_vec();
                subs.push(smp.marking(40));
                for m in subs.into_iter().filter(|m| *m != s) {
                    tried += 1;
                    if check_hierarchy_axioms(&h.with_step(idx, m), &hc).unwrap().passed() {
                        missed += 1;
                    }
                }
            }
            (ok, tried, missed)
        })
        .collect();
    let failed = res.iter().filter(|r| !r.0).count();
    let tried: usize = res.iter().map(|r| r.1).sum();
    let missed: usize = res.iter().map(|r| r.2).sum();
    verdict(
        failed == 0 && missed == 0,
        format!("{failed}/1000 paths fail (M1 = {}, M2 = {}, K_H = {}); {missed}/{tried} single-step mutations undetected", hc.m1, hc.m2, hc.k_h),
    )
}

fn contraction_stability(frozen: &CoarseConstants) -> Outcome {
    let p = ContractionParams::from_constants(frozen, 1_000_000).unwrap();
    let (k0, k, d) = (frozen.value("K0").unwrap(), frozen.int("K").unwrap(), frozen.int("D").unwrap());
    let pairs = bounded_corpus(SEED, S_BOUNDED, 25, 40, k).unwrap();
    let res: Vec<(usize, u64, usize, u64, usize)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let h = build_hierarchy_path(a, b).unwrap();
            let s = experiment_seed(SEED, S_BOUNDED, i);
            let con = contraction_experiment(&h, 4, s, &p).unwrap();
            let bad_c = con.samples.iter().filter(|x| x.diameter > p.n).count();
            let (mut dev, mut bad_s) = (0, 0);
            for j in 0..2u64 {
                let f = perturbed_quasi_geodesic(&h, s.wrapping_add(j * 7717), k0, 3).unwrap();
                let r = stability_experiment(&h, &f, k0, k, d).unwrap();
                dev = dev.max(r.max_deviation);
                bad_s += usize::from(!r.ok);
            }
            (con.samples.len(), con.max_diameter, bad_c, dev, bad_s)
        })
        .collect();
    let samples: usize = res.iter().map(|r| r.0).sum();
    let max_d = res.iter().map(|r| r.1).max().unwrap();
    let bad_c: usize = res.iter().map(|r| r.2).sum();
    let dev = res.iter().map(|r| r.3).max().unwrap();
    let bad_s: usize = res.iter().map(|r| r.4).sum();
    verdict(
        samples == 100 && bad_c == 0 && bad_s == 0,
        format!(
            "{samples} contraction samples, max diameter {max_d} (N = {}), {bad_c} violations; 50 perturbed {k0}-quasi-geodesics, max deviation {dev} (D = {d}), {bad_s} violations",
            p.n
        ),
    )
}

fn lipschitz() -> Outcome {
    // every core of denominator <= 20 in the window containing all sampled slopes
    const H: i64 = 20;
    let mut frames: Vec<AnnularFrame> = vec![frame(&Slope::new(1, 0).unwrap())];
    for q in 1..=20i64 {
        for p in -(H + 1) * q..=(H + 1) * q {
            if p.gcd(&q) == 1 {
                frames.push(frame(&Slope::new(p, q).unwrap()));
            }
        }
    }
    let mut smp = Sampler::new(SEED, S_LIPSCHITZ);
    let ms: Vec<Marking> = (0..1000).map(|_| smp.marking(H)).collect();
    let worst: Vec<(u64, String)> = ms
        .par_iter()
        .map(|m| {
            let mut w = (0, String::new());
            for n in m.elementary_moves() {
                for f in &frames {
                    let d = marking_annular_distance_in(f, m, &n);
                    if d > w.0 {
                        w = (d, format!("{m} -> {n} in A({})", f.core()));
                    }
                }
            }
            w
        })
        .collect();
    let (max, at) = worst.into_iter().max_by_key(|w| w.0).unwrap();
    verdict(max <= 4, format!("3000 moves x {} annuli, max d = {max} at {at}", frames.len()))
}

fn twist_growth() -> Outcome {
    let mut smp = Sampler::new(SEED, S_TWIST);
    let mut checked = 0;
    for _ in 0..100 {
        let g = smp.slope(40);
        let mut x = smp.slope(40);
        while x == g {
            x = smp.slope(40);
        }
        let t = frame(&g).dehn_twist();
        for n in -50i64..=50 {
            let y = t.pow(n).apply(&x).unwrap();
            let d = annular_distance(&g, &y, &x).unwrap() as i64;
            if (d - n.abs()).abs() > 1 {
                return verdict(false, format!("gamma {g}, x {x}, n {n}: d = {d}"));
            }
            checked += 1;
        }
    }
    pass(format!("{checked} (gamma, x, n) triples within |n| +- 1"))
}

fn main() {
    // `cargo test -- <filter>` passes arguments; this target ignores them
    let frozen = CoarseConstants::frozen();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("trace positivity", Box::new(trace_positivity)),
        ("freeness for k = 2", Box::new(freeness)),
        ("continued-fraction bound kB", Box::new(cf_bound)),
        ("class counting", Box::new(class_counting)),
        ("growth monotonicity", Box::new(growth)),
        ("distance-formula calibration", Box::new(|| formula_calibration(&frozen))),
        ("hierarchy axioms", Box::new(|| hierarchy(&frozen))),
        ("contraction and stability", Box::new(|| contraction_stability(&frozen))),
        ("Lipschitz projection", Box::new(lipschitz)),
        ("twist growth", Box::new(twist_growth)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = f();
        failed += usize::from(!o.ok);
        println!(
            "criterion {:>2}: {} {name}: {} [{:.1}s]",
            i + 1,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
