//! Exact real quadratic irrationals `(P + √D)/Q` and their periodic
//! continued fractions.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::farey::ContinuedFraction;

/// `(P + √D)/Q` with `D > 0` not a perfect square.
///
/// The stored triple is canonical: `Q` divides `D - P²` and no common
/// factor `f` with `f | P`, `f | Q`, `f² | D` can be removed while keeping
/// that divisibility. Equality is therefore structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational {
    p: BigInt,
    q: BigInt,
    d: BigInt,
}

const TRIAL_LIMIT: u64 = 1_000_000;

impl QuadraticIrrational {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let (p, q, d) = (p.into(), q.into(), d.into());
        if q.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        if !d.is_positive() {
            return Err(Error::Invalid("radicand must be positive".into()));
        }
        let s = d.sqrt();
        if &s * &s == d {
            return Err(Error::Invalid(format!("{d} is a perfect square")));
        }
        Ok(Self::normalize(p, q, d))
    }

    fn normalize(mut p: BigInt, mut q: BigInt, mut d: BigInt) -> Self {
        if !(&d - &p * &p).is_multiple_of(&q) {
            let aq = q.abs();
            p *= &aq;
            d *= &q * &q;
            q *= &aq;
        }
        let g = p.gcd(&q);
        for f in prime_factors(&g) {
            loop {
                let f2 = &f * &f;
                if !(p.is_multiple_of(&f) && q.is_multiple_of(&f) && d.is_multiple_of(&f2)) {
                    break;
                }
                if !(&d - &p * &p).is_multiple_of(&(&q * &f)) {
                    break;
                }
                p /= &f;
                q /= &f;
                d /= &f2;
            }
        }
        QuadraticIrrational { p, q, d }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    /// The Galois conjugate `(P - √D)/Q`.
    pub fn conjugate(&self) -> Self {
        Self::normalize(-&self.p, -&self.q, self.d.clone())
    }

    pub fn floor(&self) -> BigInt {
        let s = self.d.sqrt();
        if self.q.is_positive() {
            (&self.p + &s).div_floor(&self.q)
        } else {
            (-&self.p - &s - BigInt::one()).div_floor(&(-&self.q))
        }
    }

    /// Exact comparison against `num/den`, `den > 0`. Never `Equal`.
    pub fn cmp_rational(&self, num: &BigInt, den: &BigInt) -> Ordering {
        debug_assert!(den.is_positive());
        // x < n/m  <=>  m√D < nQ - mP   (Q > 0), reversed for Q < 0
        let r = num * &self.q - den * &self.p;
        let lhs_sq = den * den * &self.d;
        let sqrt_less = if r.is_positive() { lhs_sq < &r * &r } else { false };
        let x_less = if self.q.is_positive() { sqrt_less } else { !sqrt_less };
        if x_less {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn is_positive(&self) -> bool {
        self.cmp_rational(&BigInt::zero(), &BigInt::one()) == Ordering::Greater
    }

    pub fn to_f64(&self) -> f64 {
        let d = self.d.to_f64().unwrap_or(f64::INFINITY);
        (self.p.to_f64().unwrap_or(f64::NAN) + d.sqrt()) / self.q.to_f64().unwrap_or(f64::NAN)
    }

    /// Image under `z -> (a z + b)/(c z + d)` for an integer matrix of
    /// determinant ±1.
    pub fn mobius(&self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Self {
        let det = a * d - b * c;
        let u = a * &self.p + b * &self.q;
        let v = c * &self.p + d * &self.q;
        let x = &u * &v - a * c * &self.d;
        let n = &v * &v - c * c * &self.d;
        let s = det * &self.q;
        let rad = &s * &s * &self.d;
        if s.is_positive() {
            Self::normalize(x, n, rad)
        } else {
            Self::normalize(-x, -n, rad)
        }
    }

    /// Eventually periodic continued fraction, computed on integer triples.
    pub fn continued_fraction(&self) -> ContinuedFraction {
        let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
        let mut entries: Vec<BigInt> = Vec::new();
        let (mut p, mut q) = (self.p.clone(), self.q.clone());
        let s = self.d.sqrt();
        loop {
            if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
                let mut period = entries.split_off(start);
                if entries.is_empty() {
                    // keep a0 outside the bracket: [(2)] is written [2;(2)]
                    entries.push(period[0].clone());
                    period.rotate_left(1);
                }
                return ContinuedFraction { head: entries, period };
            }
            seen.insert((p.clone(), q.clone()), entries.len());
            let a = if q.is_positive() {
                (&p + &s).div_floor(&q)
            } else {
                (-&p - &s - BigInt::one()).div_floor(&(-&q))
            };
            let p_next = &a * &q - &p;
            let q_next = (&self.d - &p_next * &p_next) / &q;
            entries.push(a);
            p = p_next;
            q = q_next;
        }
    }

    /// The value of an infinite periodic expansion.
    pub fn from_periodic_cf(cf: &ContinuedFraction) -> Result<Self> {
        if !cf.is_periodic() {
            return Err(Error::Invalid("expansion has no periodic tail".into()));
        }
        // purely periodic y = [(b1..bk)] solves y = (p_k y + p_{k-1})/(q_k y + q_{k-1})
        let period = ContinuedFraction::finite(cf.period.clone());
        let conv = period.convergents(cf.period.len() + 1);
        let k = cf.period.len();
        let (pk, qk) = conv[k - 1].clone();
        let (pk1, qk1) = if k >= 2 { conv[k - 2].clone() } else { (BigInt::one(), BigInt::zero()) };
        // qk y^2 + (qk1 - pk) y - pk1 = 0, root > 1
        let b = &qk1 - &pk;
        let disc = &b * &b + BigInt::from(4) * &qk * &pk1;
        let y = QuadraticIrrational::new(-b, BigInt::from(2) * &qk, disc)?;
        let y = if y.is_positive() { y } else { y.conjugate() };
        // x = [a0; a1, ..., am, y]
        let mut x = y;
        for a in cf.head.iter().rev() {
            // x <- a + 1/x
            x = x.mobius(a, &BigInt::one(), &BigInt::one(), &BigInt::zero());
        }
        Ok(x)
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_negative() {
            write!(f, "({}-sqrt({}))/{}", -&self.p, self.d, -&self.q)
        } else {
            write!(f, "({}+sqrt({}))/{}", self.p, self.d, self.q)
        }
    }
}

/// Prime factors of `|n|` (with trial division up to a fixed bound; any
/// remaining cofactor is returned as one factor).
fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut f = 2u64;
    while f <= TRIAL_LIMIT {
        let fb = BigInt::from(f);
        if &fb * &fb > n {
            break;
        }
        if n.is_multiple_of(&fb) {
            out.push(fb.clone());
            while n.is_multiple_of(&fb) {
                n /= &fb;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}
