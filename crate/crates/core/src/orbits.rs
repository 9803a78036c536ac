//! Conjugacy classes in the ψ family, their length spectrum and the
//! closed-orbit growth experiment.
//!
//! Classes of `psi(q, k)` are identified with cyclic classes (necklaces) of
//! the exponent tuple `q`. Inversion is not quotiented.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::thurston::{cf_bound_certificate, psi, translation_length, TwistTuple};

/// One cyclic class of tuples in `[1, B]^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecklaceClass {
    /// Lexicographically minimal rotation.
    pub representative: TwistTuple,
    /// Number of distinct tuples in the class (`n / period`).
    pub multiplicity: usize,
}

impl NecklaceClass {
    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }
}

fn tuple_count(n: usize, b: u64) -> Option<u128> {
    (b as u128).checked_pow(u32::try_from(n).ok()?)
}

fn check_budget(n: usize, b: u64, budget: u64) -> Result<()> {
    match tuple_count(n, b) {
        Some(t) if t <= budget as u128 => Ok(()),
        _ => Err(Error::Budget { budget }),
    }
}

fn euler_phi(mut m: u64) -> u64 {
    let mut r = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if m > 1 {
        r -= r / m;
    }
    r
}

/// `(1/n) Σ_{d|n} φ(d) B^{n/d}`, the number of necklaces.
pub fn necklace_count(n: usize, b: u64) -> Result<u128> {
    if n == 0 || b == 0 {
        return Err(Error::Precondition("n and B must be positive".into()));
    }
    let mut s: u128 = 0;
    for d in (1..=n).filter(|d| n % d == 0) {
        let t = tuple_count(n / d, b).ok_or(Error::Overflow)?;
        s = s.checked_add(t.checked_mul(euler_phi(d as u64) as u128).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
    }
    Ok(s / n as u128)
}

/// All cyclic classes of `[1, B]^n`, in lexicographic order of representatives.
/// Errors with `Budget` when `B^n` exceeds `budget`.
pub fn enumerate_classes(n: usize, b: u64, budget: u64) -> Result<Vec<NecklaceClass>> {
    if n == 0 || b == 0 {
        return Err(Error::Precondition("n and B must be positive".into()));
    }
    check_budget(n, b, budget)?;
    // Fredricksen-Kessler-Maiorana over the alphabet 0..b
    fn gen(t: usize, p: usize, n: usize, b: u64, a: &mut [u64], out: &mut Vec<NecklaceClass>) {
        if t > n {
            if n % p == 0 {
                let q = a[1..=n].iter().map(|x| x + 1).collect();
                out.push(NecklaceClass { representative: TwistTuple::new(q, b).expect("entries in range"), multiplicity: p });
            }
            return;
        }
        a[t] = a[t - p];
        gen(t + 1, p, n, b, a, out);
        for j in a[t - p] + 1..b {
            a[t] = j;
            gen(t + 1, t, n, b, a, out);
        }
    }
    let mut a = vec![0u64; n + 1];
    let mut out = Vec::new();
    gen(1, 1, n, b, &mut a, &mut out);
    Ok(out)
}

/// Translation length of `psi(class, k)` for every class of `[1, B]^n`.
pub fn length_spectrum(n: usize, b: u64, k: u64, budget: u64) -> Result<Vec<(NecklaceClass, f64)>> {
    let classes = enumerate_classes(n, b, budget)?;
    classes
        .into_par_iter()
        .map(|c| {
            let l = translation_length(&psi(&c.representative, k)?)?;
            Ok((c, l))
        })
        .collect()
}

/// Closed-orbit counts measured in the hyperbolic-plane length proxy.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxyCounts {
    /// `(L, n_K(L))` at unit-spaced `L`, cumulative.
    pub buckets: Vec<(f64, u64)>,
    /// Longest enumerated length.
    pub max_length: f64,
    /// `log(total) / max_length`.
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthEstimate {
    pub b: u64,
    pub n_max: usize,
    pub k: u64,
    /// Assumed translation-length constant: a class of length `n` has length at most `nC`.
    pub c: f64,
    /// `(nC, n_K(nC))` for `n = 1..=n_max`, exact necklace counts, cumulative.
    pub counts: Vec<(f64, u128)>,
    /// `log n_K(L) / L` at `L = n_max C`.
    pub estimate: f64,
    /// `(n log B - log n) / (n C)` for `n = 1..=n_max`.
    pub lower_bound: Vec<f64>,
    /// `log B / C`, the limit of the lower bound.
    pub lower_bound_limit: f64,
    /// Present when every class fits in the tuple budget.
    pub proxy: Option<ProxyCounts>,
}

/// `(n log B - log n) / (n C)`.
pub fn growth_lower_bound(n: usize, b: u64, c: f64) -> f64 {
    let n = n as f64;
    (n * (b as f64).ln() - n.ln()) / (n * c)
}

fn ln_u128(x: u128) -> f64 {
    match x.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => crate::thurston::big_ln(&BigInt::from(x)),
    }
}

/// Growth-rate experiment over all classes with `n <= n_max`.
///
/// Counts against the `nC` length are exact (necklace formula, verified
/// against enumeration in the tests). The hyperbolic-plane proxy needs every
/// class's matrix and is skipped when `Σ B^n` exceeds `budget`.
pub fn growth_rate(b: u64, n_max: usize, k: u64, c: f64, budget: u64) -> Result<GrowthEstimate> {
    if b == 0 || n_max == 0 || k == 0 {
        return Err(Error::Precondition("B, n_max and k must be positive".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!("C must be a positive real, got {c}")));
    }
    let mut counts = Vec::with_capacity(n_max);
    let mut total: u128 = 0;
    for n in 1..=n_max {
        total = total.checked_add(necklace_count(n, b)?).ok_or(Error::Overflow)?;
        counts.push((n as f64 * c, total));
    }
    let l = n_max as f64 * c;
    let estimate = ln_u128(total) / l;
    let lower_bound = (1..=n_max).map(|n| growth_lower_bound(n, b, c)).collect();

    let work: Option<u128> = (1..=n_max).try_fold(0u128, |s, n| s.checked_add(tuple_count(n, b)?));
    let proxy = match work {
        Some(w) if w <= budget as u128 => {
            let mut lengths = Vec::new();
            for n in 1..=n_max {
                lengths.extend(length_spectrum(n, b, k, budget)?.into_iter().map(|(_, l)| l));
            }
            lengths.sort_by(f64::total_cmp);
            let max_length = *lengths.last().expect("n_max >= 1");
            let mut buckets = Vec::new();
            let mut i = 0;
            let mut edge = 1.0;
            loop {
                while i < lengths.len() && lengths[i] <= edge {
                    i += 1;
                }
                buckets.push((edge, i as u64));
                if i == lengths.len() {
                    break;
                }
                edge += 1.0;
            }
            Some(ProxyCounts { buckets, max_length, estimate: (lengths.len() as f64).ln() / max_length })
        }
        _ => None,
    };
    Ok(GrowthEstimate {
        b,
        n_max,
        k,
        c,
        counts,
        estimate,
        lower_bound,
        lower_bound_limit: (b as f64).ln() / c,
        proxy,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxisSweep {
    pub b: u64,
    pub k: u64,
    pub n_max: usize,
    pub classes: usize,
    /// Largest cf entry of any attracting fixed point: the empirical `K(B)`.
    pub empirical_k: BigInt,
    pub bound: BigInt,
    /// A class attaining `empirical_k`.
    pub witness: Option<TwistTuple>,
    pub ok: bool,
}

/// Runs `cf_bound_certificate` on every class of length `1..=n_max`.
pub fn axis_boundedness_sweep(n_max: usize, b: u64, k: u64, budget: u64) -> Result<AxisSweep> {
    let mut classes = Vec::new();
    for n in 1..=n_max {
        classes.extend(enumerate_classes(n, b, budget)?);
    }
    let certs: Vec<_> = classes
        .par_iter()
        .map(|c| Ok((c.representative.clone(), cf_bound_certificate(&c.representative, k)?)))
        .collect::<Result<_>>()?;
    let mut empirical_k = BigInt::from(0);
    let mut witness = None;
    let mut ok = true;
    for (t, cert) in certs {
        ok &= cert.ok;
        if cert.max_entry > empirical_k {
            empirical_k = cert.max_entry;
            witness = Some(t);
        }
    }
    Ok(AxisSweep { b, k, n_max, classes: classes.len(), empirical_k, bound: BigInt::from(k) * b, witness, ok })
}
