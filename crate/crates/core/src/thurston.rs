//! Thurston's construction for a binding pair on the torus.
//!
//! Twists about `α` and `β` with `i(α, β) = k` act on slopes by
//! `[[1,k],[0,1]]` and `[[1,0],[-k,1]]`. Words are read left to right and
//! multiplied in the same order.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::farey::{ContinuedFraction, Mat2};
use crate::quadratic::QuadraticIrrational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Alpha,
    Beta,
}

impl Generator {
    fn other(self) -> Generator {
        match self {
            Generator::Alpha => Generator::Beta,
            Generator::Beta => Generator::Alpha,
        }
    }
}

/// `i(α, β) = k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BindingPair {
    k: u64,
}

impl BindingPair {
    pub fn new(k: u64) -> Result<BindingPair> {
        if k == 0 {
            return Err(Error::Precondition("intersection number must be positive".into()));
        }
        Ok(BindingPair { k })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn twist(&self, g: Generator, e: i64) -> Mat2 {
        let ke = BigInt::from(self.k) * e;
        match g {
            Generator::Alpha => Mat2::new_unchecked(BigInt::one(), ke, BigInt::zero(), BigInt::one()),
            Generator::Beta => Mat2::new_unchecked(BigInt::one(), BigInt::zero(), -ke, BigInt::one()),
        }
    }
}

/// A reduced word in the twists: adjacent letters use different generators
/// and no exponent is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TwistWord {
    letters: Vec<(Generator, i64)>,
}

impl TwistWord {
    pub fn empty() -> TwistWord {
        TwistWord::default()
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn new(letters: impl IntoIterator<Item = (Generator, i64)>) -> TwistWord {
        let mut out: Vec<(Generator, i64)> = Vec::new();
        for (g, e) in letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((h, f)) if *h == g => {
                    *f += e;
                    if *f == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        TwistWord { letters: out }
    }

    pub fn letters(&self) -> &[(Generator, i64)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &TwistWord) -> TwistWord {
        TwistWord::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> TwistWord {
        TwistWord { letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|(g, e)| {
                let name = if *g == Generator::Alpha { "a" } else { "b" };
                if *e == 1 { name.to_string() } else { format!("{name}^{e}") }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for TwistWord {
    type Err = Error;

    /// Whitespace-separated letters `a`, `b`, `a^2`, `b^-1`; `1` is the empty word.
    fn from_str(s: &str) -> Result<TwistWord> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, exp) = tok.split_once('^').unwrap_or((tok, "1"));
            let g = match name {
                "a" => Generator::Alpha,
                "b" => Generator::Beta,
                _ => return Err(Error::InvalidWord(s.to_string())),
            };
            let e: i64 = exp.parse().map_err(|_| Error::InvalidWord(s.to_string()))?;
            letters.push((g, e));
        }
        Ok(TwistWord::new(letters))
    }
}

/// Exponents `q_1, ..., q_n` with every `q_i` in `[1, B]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistTuple {
    q: Vec<u64>,
    bound: u64,
}

impl TwistTuple {
    pub fn new(q: Vec<u64>, bound: u64) -> Result<TwistTuple> {
        if q.is_empty() || bound == 0 || q.iter().any(|&x| x == 0 || x > bound) {
            return Err(Error::InvalidTuple(format!("{q:?} with bound {bound}")));
        }
        Ok(TwistTuple { q, bound })
    }

    /// The tuple with its own maximum as the bound.
    pub fn tight(q: Vec<u64>) -> Result<TwistTuple> {
        let b = q.iter().copied().max().unwrap_or(0);
        TwistTuple::new(q, b)
    }

    pub fn q(&self) -> &[u64] {
        &self.q
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `τ_α^{q_1} τ_β^{-q_1} ⋯ τ_α^{q_n} τ_β^{-q_n}`.
    pub fn word(&self) -> TwistWord {
        TwistWord::new(self.q.iter().flat_map(|&x| [(Generator::Alpha, x as i64), (Generator::Beta, -(x as i64))]))
    }
}

impl fmt::Display for TwistTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.q.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn rho(word: &TwistWord, k: u64) -> Result<Mat2> {
    let pair = BindingPair::new(k)?;
    Ok(word.letters.iter().fold(Mat2::identity(), |m, &(g, e)| m.mul(&pair.twist(g, e))))
}

pub fn psi(t: &TwistTuple, k: u64) -> Result<Mat2> {
    rho(&t.word(), k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Elliptic => "elliptic",
            Classification::Parabolic => "parabolic",
            Classification::Hyperbolic => "hyperbolic",
        };
        write!(f, "{s}")
    }
}

/// By `|tr|` against 2. `±I` falls in the parabolic class; use
/// [`Mat2::is_plus_minus_identity`] to tell it apart.
pub fn classify(m: &Mat2) -> Classification {
    let t = m.trace().abs();
    let two = BigInt::from(2);
    match t.cmp(&two) {
        std::cmp::Ordering::Less => Classification::Elliptic,
        std::cmp::Ordering::Equal => Classification::Parabolic,
        std::cmp::Ordering::Greater => Classification::Hyperbolic,
    }
}

fn require_hyperbolic(m: &Mat2) -> Result<()> {
    if classify(m) != Classification::Hyperbolic {
        return Err(Error::NotHyperbolic);
    }
    Ok(())
}

/// Natural log of a positive big integer.
pub(crate) fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `2 arccosh(|tr|/2)`.
pub fn translation_length(m: &Mat2) -> Result<f64> {
    require_hyperbolic(m)?;
    let t = m.trace().abs();
    match t.to_f64() {
        Some(tf) if tf < 1e15 => Ok(2.0 * (tf / 2.0).acosh()),
        // acosh(t/2) = ln t - t^-2 - ...
        _ => Ok(2.0 * big_ln(&t)),
    }
}

/// `(attracting, repelling)` fixed points on the boundary, exactly.
pub fn fixed_points(m: &Mat2) -> Result<(QuadraticIrrational, QuadraticIrrational)> {
    require_hyperbolic(m)?;
    let [a, b, c, d] = m.entries();
    let tr = m.trace();
    let disc = &tr * &tr - BigInt::from(4);
    if c.is_zero() {
        // unreachable for det 1 and |tr| > 2, kept for safety
        return Err(Error::NotHyperbolic);
    }
    let _ = b;
    // x = (a - d ± √disc)/(2c); |cx + d| > 1 at the attracting point
    let two_c = BigInt::from(2) * c;
    let plus = QuadraticIrrational::new(a - d, two_c.clone(), disc.clone())?;
    let minus = QuadraticIrrational::new(-(a - d), -two_c, disc)?;
    if tr.is_positive() {
        Ok((plus, minus))
    } else {
        Ok((minus, plus))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfCertificate {
    pub cf: ContinuedFraction,
    pub max_entry: BigInt,
    pub bound: BigInt,
    pub ok: bool,
}

/// Checks that every continued-fraction entry (preperiod and period) of the
/// attracting fixed point of `psi(t, k)` is at most `kB`.
pub fn cf_bound_certificate(t: &TwistTuple, k: u64) -> Result<CfCertificate> {
    if k < 2 {
        return Err(Error::Precondition("k must be at least 2".into()));
    }
    let (attr, _) = fixed_points(&psi(t, k)?)?;
    let cf = attr.continued_fraction();
    let max_entry = cf.entries().max().cloned().expect("nonempty");
    let bound = BigInt::from(k) * t.bound();
    let ok = max_entry <= bound;
    Ok(CfCertificate { cf, max_entry, bound, ok })
}

const FREE_EXPONENTS: [i64; 6] = [-3, -2, -1, 1, 2, 3];

/// All reduced words of letter-length exactly `len` with exponents in `±1..=3`.
fn words_of_length(len: usize) -> impl ParallelIterator<Item = TwistWord> {
    let per_gen = FREE_EXPONENTS.len().pow(len as u32);
    (0..2 * per_gen).into_par_iter().map(move |idx| {
        let first = if idx < per_gen { Generator::Alpha } else { Generator::Beta };
        let mut r = idx % per_gen;
        let mut g = first;
        let mut letters = Vec::with_capacity(len);
        for _ in 0..len {
            letters.push((g, FREE_EXPONENTS[r % FREE_EXPONENTS.len()]));
            r /= FREE_EXPONENTS.len();
            g = g.other();
        }
        TwistWord { letters }
    })
}

/// A nonempty reduced word of letter-length at most `maxlen` (exponents in
/// `[-3, 3]`) whose image is `±I`, shortest first.
pub fn find_relation(k: u64, maxlen: usize) -> Result<Option<TwistWord>> {
    BindingPair::new(k)?;
    for len in 1..=maxlen {
        let hit = words_of_length(len).find_first(|w| rho(w, k).expect("k > 0").is_plus_minus_identity());
        if hit.is_some() {
            return Ok(hit);
        }
    }
    Ok(None)
}

/// True iff no short nonempty reduced word maps to `±I`.
pub fn free_group_check(k: u64, maxlen: usize) -> Result<bool> {
    Ok(find_relation(k, maxlen)?.is_none())
}

/// Every tuple of length `n` with entries in `[1, b]`, in lexicographic order.
pub fn all_tuples(n: usize, b: u64) -> Vec<TwistTuple> {
    let mut out = Vec::new();
    let mut cur = vec![1u64; n];
    if n == 0 || b == 0 {
        return out;
    }
    loop {
        out.push(TwistTuple { q: cur.clone(), bound: b });
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < b {
                cur[i] += 1;
                cur[i + 1..].iter_mut().for_each(|x| *x = 1);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(s: &str) -> Mat2 {
        s.parse().unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&TwistWord::empty(), 2).unwrap(), Mat2::identity());
        assert_eq!(rho(&"a".parse().unwrap(), 2).unwrap(), mat("[[1,2],[0,1]]"));
        assert_eq!(rho(&"a b^-1".parse().unwrap(), 2).unwrap(), mat("[[5,2],[2,1]]"));
        assert!(rho(&TwistWord::empty(), 0).is_err());
    }

    #[test]
    fn psi_examples() {
        let p1 = psi(&TwistTuple::tight(vec![1]).unwrap(), 2).unwrap();
        assert_eq!(p1, mat("[[5,2],[2,1]]"));
        assert_eq!(p1.trace(), BigInt::from(6));
        let p2 = psi(&TwistTuple::tight(vec![2]).unwrap(), 2).unwrap();
        assert_eq!(p2, mat("[[17,4],[4,1]]"));
        assert_eq!(p2.trace(), BigInt::from(18));
    }

    #[test]
    fn word_reduction() {
        let w: TwistWord = "a a^-1 b b^2 a".parse().unwrap();
        assert_eq!(w.to_string(), "b^3 a");
        assert!(TwistTuple::new(vec![0], 3).is_err());
        assert!(TwistTuple::new(vec![4], 3).is_err());
        assert!(TwistTuple::new(vec![], 3).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&Mat2::identity()), Classification::Parabolic);
        assert!(Mat2::identity().neg().is_plus_minus_identity());
        assert_eq!(classify(&mat("[[1,3],[0,1]]")), Classification::Parabolic);
        assert_eq!(classify(&mat("[[5,2],[2,1]]")), Classification::Hyperbolic);
        assert_eq!(classify(&mat("[[0,-1],[1,0]]")), Classification::Elliptic);
    }

    #[test]
    fn translation_lengths() {
        let m = mat("[[5,2],[2,1]]");
        let l = translation_length(&m).unwrap();
        assert!((l - 2.0 * 3f64.acosh()).abs() < 1e-12);
        assert!((l - 3.525494348078172).abs() < 1e-9);
        assert_eq!(translation_length(&m.inverse()).unwrap(), l);
        let c = mat("[[2,1],[1,1]]");
        assert!((translation_length(&c.mul(&m).mul(&c.inverse())).unwrap() - l).abs() < 1e-12);
        assert!(translation_length(&Mat2::identity()).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        let (a, r) = fixed_points(&mat("[[5,2],[2,1]]")).unwrap();
        assert_eq!(a, QuadraticIrrational::new(1, 1, 2).unwrap());
        assert_eq!(r, a.conjugate());
        let (a5, _) = fixed_points(&mat("[[17,4],[4,1]]")).unwrap();
        assert_eq!(a5, QuadraticIrrational::new(2, 1, 5).unwrap());
        let m = mat("[[5,2],[2,1]]");
        let (ai, ri) = fixed_points(&m.inverse()).unwrap();
        assert_eq!((ai, ri), (r, a.clone()));
        // exact substitution
        let [p, q, s, t] = m.entries();
        assert_eq!(a.mobius(p, q, s, t), a);
    }

    #[test]
    fn certificate_examples() {
        let c = cf_bound_certificate(&TwistTuple::new(vec![1], 1).unwrap(), 2).unwrap();
        assert_eq!((c.max_entry.clone(), c.bound.clone(), c.ok), (BigInt::from(2), BigInt::from(2), true));
        assert_eq!(c.cf.to_string(), "[2;(2)]");
        let c = cf_bound_certificate(&TwistTuple::new(vec![2], 2).unwrap(), 2).unwrap();
        assert_eq!((c.max_entry.clone(), c.bound.clone(), c.ok), (BigInt::from(4), BigInt::from(4), true));
    }

    #[test]
    fn relations_for_k_one() {
        let w = find_relation(1, 6).unwrap().expect("k = 1 has relations");
        assert!(rho(&w, 1).unwrap().is_plus_minus_identity());
        assert!(!w.is_empty());
    }

    #[test]
    fn homomorphism_on_short_words() {
        let words: Vec<TwistWord> = (1..=3).flat_map(|l| words_of_length(l).collect::<Vec<_>>()).step_by(7).collect();
        for u in words.iter().take(60) {
            for v in words.iter().take(60) {
                assert_eq!(rho(&u.concat(v), 3).unwrap(), rho(u, 3).unwrap().mul(&rho(v, 3).unwrap()));
            }
        }
    }

    #[test]
    fn trace_monotone_in_each_coordinate() {
        for k in 2..=3 {
            for n in 1..=4 {
                for t in all_tuples(n, 4) {
                    let tr = psi(&t, k).unwrap().trace();
                    for i in 0..n {
                        if t.q[i] > 1 {
                            let mut q = t.q.clone();
                            q[i] -= 1;
                            let smaller = psi(&TwistTuple::new(q, 4).unwrap(), k).unwrap().trace();
                            assert!(tr >= smaller, "{t} k={k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tuple_enumeration() {
        assert_eq!(all_tuples(3, 2).len(), 8);
        assert_eq!(all_tuples(2, 3)[1].q(), &[1, 2]);
    }
}
