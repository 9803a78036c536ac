//! Slopes on the once-punctured torus and the Farey graph.
//!
//! A simple closed curve on the torus is a reduced fraction `p/q`; two
//! curves span an edge of the curve complex when they meet exactly once,
//! which makes the curve complex the Farey graph.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A vertex of the torus curve complex, stored in canonical form:
/// `gcd(|p|, q) = 1`, `q >= 0`, and infinity is `1/0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };
    pub const ZERO: Slope = Slope { p: 0, q: 1 };

    pub fn new(p: i64, q: i64) -> Result<Slope> {
        Slope::from_i128(p as i128, q as i128)
    }

    pub(crate) fn from_i128(p: i128, q: i128) -> Result<Slope> {
        if p == 0 && q == 0 {
            return Err(Error::Parse("0/0 is not a slope".into()));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        match (i64::try_from(p), i64::try_from(q)) {
            (Ok(p), Ok(q)) => Ok(Slope { p, q }),
            _ => Err(Error::Overflow),
        }
    }

    pub(crate) fn from_bigints(p: &BigInt, q: &BigInt) -> Result<Slope> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::Parse("0/0 is not a slope".into()));
        }
        let g = p.gcd(q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        match (p.to_i64(), q.to_i64()) {
            (Some(p), Some(q)) => Ok(Slope { p, q }),
            _ => Err(Error::Overflow),
        }
    }

    pub fn integer(n: i64) -> Slope {
        Slope { p: n, q: 1 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.q == 0
    }

    /// `max(|p|, q)`; the cap used to make neighbour sets finite.
    pub fn height(&self) -> i64 {
        self.p.abs().max(self.q)
    }

    /// Neighbours of this slope in the Farey graph whose height is at most `cap`,
    /// in increasing order of their position in the fan around `self`.
    pub fn neighbors_within(&self, cap: i64) -> Vec<Slope> {
        // Neighbours are (p n + a)/(q n + b) for n in Z where p b - a q = 1.
        let (a, b) = complement(self.p, self.q);
        let (p, q) = (self.p as i128, self.q as i128);
        let (a, b) = (a as i128, b as i128);
        let cap = cap as i128;
        let mut lo = i128::MIN / 4;
        let mut hi = i128::MAX / 4;
        for (coef, off) in [(p, a), (q, b)] {
            if coef == 0 {
                if off.abs() > cap {
                    return Vec::new();
                }
                continue;
            }
            // -cap <= coef*n + off <= cap
            let (l, h) = if coef > 0 {
                (div_ceil(-cap - off, coef), div_floor(cap - off, coef))
            } else {
                (div_ceil(cap - off, coef), div_floor(-cap - off, coef))
            };
            lo = lo.max(l);
            hi = hi.min(h);
        }
        let mut out = Vec::new();
        let mut n = lo;
        while n <= hi {
            out.push(Slope::from_i128(p * n + a, q * n + b).expect("neighbour fits"));
            n += 1;
        }
        out
    }
}

/// Some `(a, b)` with `p b - a q = 1`, so `[[p, a], [q, b]]` sends infinity to `p/q`.
pub(crate) fn complement(p: i64, q: i64) -> (i64, i64) {
    if q == 0 {
        return (0, 1);
    }
    // extended gcd: p x + q y = 1 -> b = x, a = -y
    let e = (p as i128).extended_gcd(&(q as i128));
    let (x, y) = if e.gcd < 0 { (-e.x, -e.y) } else { (e.x, e.y) };
    (-(y as i64), x as i64)
}

fn div_floor(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&(-a), &b)
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Slope> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Slope::INFINITY);
        }
        let bad = || Error::Parse(format!("bad slope {s:?}, expected p/q or inf"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p = p.trim().parse::<i64>().map_err(|_| bad())?;
                let q = q.trim().parse::<i64>().map_err(|_| bad())?;
                Slope::new(p, q)
            }
            None => Ok(Slope::integer(s.parse::<i64>().map_err(|_| bad())?)),
        }
    }
}

/// Geometric intersection number `|p s - r q|` of two torus slopes.
pub fn intersection_number(x: &Slope, y: &Slope) -> u64 {
    let v = x.p as i128 * y.q as i128 - y.p as i128 * x.q as i128;
    v.unsigned_abs() as u64
}

pub fn adjacent(x: &Slope, y: &Slope) -> bool {
    intersection_number(x, y) == 1
}

/// Continued fraction `[a0; a1, a2, ...]`, optionally with a periodic tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    pub head: Vec<BigInt>,
    pub period: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn finite(entries: Vec<BigInt>) -> Self {
        ContinuedFraction { head: entries, period: Vec::new() }
    }

    pub fn is_periodic(&self) -> bool {
        !self.period.is_empty()
    }

    /// All distinct entries that occur anywhere in the expansion.
    pub fn entries(&self) -> impl Iterator<Item = &BigInt> {
        self.head.iter().chain(self.period.iter())
    }

    /// Exact value `(num, den)` of a finite expansion, `den > 0`.
    pub fn value(&self) -> Option<(BigInt, BigInt)> {
        if self.is_periodic() || self.head.is_empty() {
            return None;
        }
        let (mut num, mut den) = (BigInt::one(), BigInt::zero());
        for a in self.head.iter().rev() {
            let next = a * &num + &den;
            den = num;
            num = next;
        }
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Some((num, den))
    }

    /// Convergents `p_i/q_i` of the first `n` entries (period unrolled).
    pub fn convergents(&self, n: usize) -> Vec<(BigInt, BigInt)> {
        let mut out = Vec::with_capacity(n);
        let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        for a in self.iter_entries().take(n) {
            let p2 = a * &p1 + &p0;
            let q2 = a * &q1 + &q0;
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
            out.push((p1.clone(), q1.clone()));
        }
        out
    }

    /// Entries in order, cycling through the period forever when periodic.
    pub fn iter_entries(&self) -> Box<dyn Iterator<Item = &BigInt> + '_> {
        if self.period.is_empty() {
            Box::new(self.head.iter())
        } else {
            Box::new(self.head.iter().chain(self.period.iter().cycle()))
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut all = self.head.iter();
        match all.next() {
            Some(a0) => write!(f, "{a0}")?,
            None => {
                // purely periodic: the first period entry plays a0 only inside the bracket
                write!(f, ";(")?;
                let period: Vec<String> = self.period.iter().map(|a| a.to_string()).collect();
                return write!(f, "{})]", period.join(","));
            }
        }
        let rest: Vec<String> = all.map(|a| a.to_string()).collect();
        if rest.is_empty() && self.period.is_empty() {
            return write!(f, "]");
        }
        write!(f, ";{}", rest.join(","))?;
        if !self.period.is_empty() {
            if !rest.is_empty() {
                write!(f, ",")?;
            }
            let period: Vec<String> = self.period.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", period.join(","))?;
        }
        write!(f, "]")
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;

    /// Accepts `[a0;a1,...]` and `[a0;a1,...,(b1,...,bk)]`; the comma before
    /// the periodic group is optional.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad continued fraction {s:?}"));
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (pre, period) = match body.find('(') {
            Some(i) => {
                let tail = body[i + 1..].strip_suffix(')').ok_or_else(bad)?;
                (&body[..i], Some(tail))
            }
            None => (body, None),
        };
        let parse_list = |t: &str| -> Result<Vec<BigInt>> {
            t.split([',', ';'])
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<BigInt>().map_err(|_| bad()))
                .collect()
        };
        let head = parse_list(pre)?;
        let period = match period {
            Some(t) => parse_list(t)?,
            None => Vec::new(),
        };
        if head.is_empty() && period.is_empty() {
            return Err(bad());
        }
        for a in head.iter().skip(1).chain(period.iter()) {
            if !a.is_positive() {
                return Err(bad());
            }
        }
        Ok(ContinuedFraction { head, period })
    }
}

/// Canonical continued fraction of a finite slope; the last entry is at
/// least 2 whenever there is more than one entry.
pub fn cf_expand(x: &Slope) -> Result<ContinuedFraction> {
    if x.is_infinite() {
        return Err(Error::InfiniteSlope);
    }
    let (mut p, mut q) = (x.p, x.q);
    let mut entries = Vec::new();
    while q != 0 {
        let a = Integer::div_floor(&p, &q);
        entries.push(BigInt::from(a));
        let r = p - a * q;
        p = q;
        q = r;
    }
    Ok(ContinuedFraction::finite(entries))
}

/// Exact 2x2 integer matrix of determinant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Mat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Mat2> {
        let m = Mat2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        if &m.a * &m.d - &m.b * &m.c != BigInt::one() {
            return Err(Error::Determinant);
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Mat2 {
        debug_assert_eq!(&a * &d - &b * &c, BigInt::one());
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Mat2 {
        Mat2::new_unchecked(BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> Mat2 {
        Mat2 { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    pub fn pow(&self, e: i64) -> Mat2 {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Mat2::identity();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.d.is_one() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && self.a.abs().is_one()
    }

    /// Möbius action `p/q -> (a p + b q)/(c p + d q)`.
    ///
    /// Fails only if the image does not fit the `i64` slope representation.
    pub fn apply(&self, x: &Slope) -> Result<Slope> {
        let (p, q) = (BigInt::from(x.p), BigInt::from(x.q));
        Slope::from_bigints(&(&self.a * &p + &self.b * &q), &(&self.c * &p + &self.d * &q))
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for Mat2 {
    type Err = Error;

    /// Parses `[[a,b],[c,d]]` or `a,b,c,d`.
    fn from_str(s: &str) -> Result<Mat2> {
        let nums: Vec<BigInt> = s
            .split(|c: char| !(c.is_ascii_digit() || c == '-'))
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<BigInt>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad matrix {s:?}")))?;
        match <[BigInt; 4]>::try_from(nums) {
            Ok([a, b, c, d]) => Mat2::new(a, b, c, d),
            Err(_) => Err(Error::Parse(format!("bad matrix {s:?}, expected four entries"))),
        }
    }
}

/// Distances between BFS runs at two successive height caps must agree
/// before a value is accepted.
const INITIAL_SLACK: i64 = 2;
const MAX_CAP: i64 = 1 << 20;

/// Graph distance in the Farey graph.
pub fn farey_distance(x: &Slope, y: &Slope) -> u64 {
    farey_geodesic(x, y).len() as u64 - 1
}

/// A shortest path from `x` to `y` in the Farey graph, both endpoints included.
///
/// Neighbour sets are infinite, so the search runs inside a height cap that
/// starts just above the endpoints and doubles until two successive caps give
/// the same length.
pub fn farey_geodesic(x: &Slope, y: &Slope) -> Vec<Slope> {
    if x == y {
        return vec![*x];
    }
    if adjacent(x, y) {
        return vec![*x, *y];
    }
    let mut cap = x.height().max(y.height()) + INITIAL_SLACK;
    let mut best = capped_geodesic(x, y, cap);
    loop {
        let wider = (cap * 2).min(MAX_CAP);
        let next = capped_geodesic(x, y, wider);
        let stable = match (&best, &next) {
            (Some(a), Some(b)) => a.len() == b.len(),
            _ => false,
        };
        if stable || wider == MAX_CAP {
            return next.or(best).expect("Farey graph is connected");
        }
        best = next;
        cap = wider;
    }
}

/// Bidirectional BFS restricted to slopes of height at most `cap`.
fn capped_geodesic(x: &Slope, y: &Slope, cap: i64) -> Option<Vec<Slope>> {
    let mut parent_x: HashMap<Slope, Slope> = HashMap::from([(*x, *x)]);
    let mut parent_y: HashMap<Slope, Slope> = HashMap::from([(*y, *y)]);
    let mut front_x = vec![*x];
    let mut front_y = vec![*y];
    loop {
        if front_x.is_empty() || front_y.is_empty() {
            return None;
        }
        let from_x = front_x.len() <= front_y.len();
        let (front, parents, others) = if from_x {
            (&mut front_x, &mut parent_x, &parent_y)
        } else {
            (&mut front_y, &mut parent_y, &parent_x)
        };
        let mut next = Vec::new();
        let mut meet = None;
        for v in front.iter() {
            for w in v.neighbors_within(cap) {
                if parents.contains_key(&w) {
                    continue;
                }
                parents.insert(w, *v);
                if meet.is_none() && others.contains_key(&w) {
                    meet = Some(w);
                }
                next.push(w);
            }
        }
        if let Some(m) = meet {
            let mut path = walk(&parent_x, m);
            path.reverse();
            path.pop();
            path.extend(walk(&parent_y, m));
            return Some(path);
        }
        *front = next;
    }
}

fn walk(parents: &HashMap<Slope, Slope>, from: Slope) -> Vec<Slope> {
    let mut out = vec![from];
    let mut cur = from;
    while let Some(&p) = parents.get(&cur) {
        if p == cur {
            break;
        }
        out.push(p);
        cur = p;
    }
    out
}

/// Plain single-source BFS distances from `x` inside a height cap. Used by
/// callers that need many distances from one source.
pub fn farey_ball(x: &Slope, cap: i64, radius: u64) -> HashMap<Slope, u64> {
    let mut dist = HashMap::from([(*x, 0u64)]);
    let mut queue = VecDeque::from([*x]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for w in v.neighbors_within(cap) {
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                d + 1
            });
        }
    }
    dist
}

type V = (i128, i128);

fn canon_v(v: V) -> V {
    if v.1 < 0 || (v.1 == 0 && v.0 < 0) {
        (-v.0, -v.1)
    } else {
        v
    }
}

/// Distance computed inside the Farey ladder between `x` and `y`.
///
/// Some geodesic always stays among the vertices of the triangles separating
/// `x` from `y`: an excursion beyond a boundary edge of that strip leaves and
/// re-enters through the edge's endpoints and can be replaced by the edge
/// itself. Interior vertices of long fans are dropped, since walking through
/// the fan's pivot is never longer. The cost is linear in the number of
/// continued-fraction entries.
pub fn ladder_distance(x: &Slope, y: &Slope) -> u64 {
    ladder_geodesic(x, y).len() as u64 - 1
}

pub fn ladder_geodesic(x: &Slope, y: &Slope) -> Vec<Slope> {
    if x == y {
        return vec![*x];
    }
    if adjacent(x, y) {
        return vec![*x, *y];
    }
    let (p, q) = (x.p as i128, x.q as i128);
    let (a, b) = complement(x.p, x.q);
    let (a, b) = (a as i128, b as i128);
    // [[b, -a], [-q, p]] sends x to infinity
    let to = |s: &Slope| canon_v((b * s.p as i128 - a * s.q as i128, -q * s.p as i128 + p * s.q as i128));
    let back = |v: V| Slope::from_i128(p * v.0 + a * v.1, q * v.0 + b * v.1).expect("ladder vertex fits");
    let target = to(y);
    let inf: V = (1, 0);
    let f = div_floor(target.0, target.1);
    let (mut l, mut r): (V, V) = ((f, 1), (f + 1, 1));
    let mut adj: HashMap<V, Vec<V>> = HashMap::new();
    let mut edge = |u: V, v: V| {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    };
    edge(inf, l);
    edge(inf, r);
    edge(l, r);
    let before = |u: V, v: V| u.0 * v.1 < v.0 * u.1;
    while l != target && r != target {
        let m = (l.0 + r.0, l.1 + r.1);
        let (pivot, from, k) = if !before(m, target) {
            // target in (l, m]: fan about l
            let k = (target.1 * r.0 - target.0 * r.1) / (target.0 * l.1 - target.1 * l.0);
            (l, r, k)
        } else {
            let k = (target.0 * l.1 - target.1 * l.0) / (target.1 * r.0 - target.0 * r.1);
            (r, l, k)
        };
        let fan = |j: i128| (from.0 + j * pivot.0, from.1 + j * pivot.1);
        let kept: Vec<i128> = {
            let mut v: Vec<i128> = [0, 1, 2, k - 1, k].into_iter().filter(|&j| (0..=k).contains(&j)).collect();
            v.sort();
            v.dedup();
            v
        };
        for (i, &j) in kept.iter().enumerate() {
            if j > 0 {
                edge(pivot, fan(j));
            }
            if i > 0 && kept[i - 1] == j - 1 {
                edge(fan(j - 1), fan(j));
            }
        }
        let end = fan(k);
        if pivot == l {
            r = end;
        } else {
            l = end;
        }
    }
    // BFS from infinity, neighbours in a fixed order
    for list in adj.values_mut() {
        list.sort();
        list.dedup();
    }
    let mut parent: HashMap<V, V> = HashMap::from([(inf, inf)]);
    let mut queue = VecDeque::from([inf]);
    while let Some(v) = queue.pop_front() {
        if v == target {
            break;
        }
        for &w in &adj[&v] {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(w) {
                e.insert(v);
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![target];
    let mut cur = target;
    while cur != inf {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    path.into_iter().map(back).collect()
}
