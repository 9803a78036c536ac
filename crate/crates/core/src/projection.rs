//! Annular subsurface projections on the torus.
//!
//! The twist complex of the annulus about `γ` is modelled by the integer
//! part of a slope after moving `γ` to infinity with a fixed frame matrix.
//! Projection distances carry a `+1` so that a single projection has
//! diameter 1.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::farey::{cf_expand, farey_distance, ContinuedFraction, Mat2, Slope};
use crate::marking::Marking;
use crate::quadratic::QuadraticIrrational;

/// A matrix sending the core curve to infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnularFrame {
    core: Slope,
    frame: Mat2,
}

impl AnnularFrame {
    /// Deterministic frame built from the continuants of `core`: the bottom
    /// row is `(-q, p)` and the top row comes from the penultimate convergent.
    pub fn new(core: Slope) -> AnnularFrame {
        if core.is_infinite() {
            return AnnularFrame { core, frame: Mat2::identity() };
        }
        let cf = cf_expand(&core).expect("finite slope");
        let m = cf.head.len();
        let (pp, qp) = if m >= 2 {
            cf.convergents(m - 1).pop().expect("nonempty")
        } else {
            (BigInt::one(), BigInt::zero())
        };
        // p_k q_{k-1} - p_{k-1} q_k = (-1)^(k-1) with k = m - 1
        let sign = if m % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let (p, q) = (BigInt::from(core.p()), BigInt::from(core.q()));
        let frame = Mat2::new(&sign * qp, -&sign * pp, -q, p).expect("continuant frame has determinant 1");
        AnnularFrame { core, frame }
    }

    pub fn core(&self) -> Slope {
        self.core
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.frame
    }

    /// The same annulus with the frame changed by the stabiliser element
    /// `z -> z + shift`.
    pub fn shifted(&self, shift: i64) -> AnnularFrame {
        let t = Mat2::new(1, shift, 0, 1).expect("unipotent");
        AnnularFrame { core: self.core, frame: t.mul(&self.frame) }
    }

    pub fn twist_coordinate(&self, x: &Slope) -> Result<i64> {
        if *x == self.core {
            return Err(Error::UndefinedProjection { gamma: self.core.to_string(), x: x.to_string() });
        }
        let [a, b, c, d] = self.frame.entries();
        let (p, q) = (BigInt::from(x.p()), BigInt::from(x.q()));
        let num = a * &p + b * &q;
        let den = c * &p + d * &q;
        debug_assert!(!den.is_zero());
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        i64::try_from(num.div_floor(&den)).map_err(|_| Error::Overflow)
    }

    /// The Dehn twist about the core, `F⁻¹ [[1,1],[0,1]] F`.
    pub fn dehn_twist(&self) -> Mat2 {
        let t = Mat2::new(1, 1, 0, 1).expect("unipotent");
        self.frame.inverse().mul(&t).mul(&self.frame)
    }
}

pub fn frame(gamma: &Slope) -> AnnularFrame {
    AnnularFrame::new(*gamma)
}

/// Integer twist coordinate of `x` in the annulus about `gamma`.
pub fn twist_coordinate(gamma: &Slope, x: &Slope) -> Result<i64> {
    AnnularFrame::new(*gamma).twist_coordinate(x)
}

/// `d_γ(x, y) = |tw(x) - tw(y)| + 1`.
pub fn annular_distance(gamma: &Slope, x: &Slope, y: &Slope) -> Result<u64> {
    annular_distance_in(&AnnularFrame::new(*gamma), x, y)
}

pub fn annular_distance_in(f: &AnnularFrame, x: &Slope, y: &Slope) -> Result<u64> {
    Ok(f.twist_coordinate(x)?.abs_diff(f.twist_coordinate(y)?) + 1)
}

/// Twist coordinates of the curves of `m` that cross the annulus. The base
/// and transversal differ, so this is never empty.
pub fn marking_projection(f: &AnnularFrame, m: &Marking) -> Vec<i64> {
    [m.base(), m.transversal()]
        .iter()
        .filter(|s| **s != f.core())
        .map(|s| f.twist_coordinate(s).expect("curve crosses the annulus"))
        .collect()
}

/// Diameter (plus one) of the union of the projections of two markings.
pub fn marking_annular_distance_in(f: &AnnularFrame, m1: &Marking, m2: &Marking) -> u64 {
    let mut all = marking_projection(f, m1);
    all.extend(marking_projection(f, m2));
    let lo = *all.iter().min().expect("nonempty");
    let hi = *all.iter().max().expect("nonempty");
    hi.abs_diff(lo) + 1
}

pub fn marking_annular_distance(gamma: &Slope, m1: &Marking, m2: &Marking) -> u64 {
    marking_annular_distance_in(&AnnularFrame::new(*gamma), m1, m2)
}

/// `(d_α(β, x), d_β(α, x))`.
pub fn behrstock_gap(alpha: &Slope, beta: &Slope, x: &Slope) -> Result<(u64, u64)> {
    Ok((annular_distance(alpha, beta, x)?, annular_distance(beta, alpha, x)?))
}

/// A domain of the torus: the whole surface or an annulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Whole,
    Annulus(Slope),
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Whole => write!(f, "S"),
            Domain::Annulus(g) => write!(f, "A({g})"),
        }
    }
}

/// Projection distances between markings, per domain. `None` means one of
/// the projections is empty.
pub trait ProjectionOracle {
    fn distance(&self, domain: &Domain, a: &Marking, b: &Marking) -> Option<u64>;
}

/// The torus model: Farey distance between bases for the whole surface and
/// twist-coordinate diameters for annuli.
#[derive(Clone, Copy, Debug, Default)]
pub struct TorusProjections;

impl ProjectionOracle for TorusProjections {
    fn distance(&self, domain: &Domain, a: &Marking, b: &Marking) -> Option<u64> {
        match domain {
            Domain::Whole => Some(farey_distance(&a.base(), &b.base())),
            Domain::Annulus(g) => Some(marking_annular_distance(g, a, b)),
        }
    }
}

/// A boundary point of the Farey graph: a slope or a real quadratic irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Rational(Slope),
    Quadratic(QuadraticIrrational),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Rational(s) => write!(f, "{s}"),
            Endpoint::Quadratic(x) => write!(f, "cf:{}", x.continued_fraction()),
        }
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    /// `p/q`, `inf`, or `cf:[a0;a1,...,(p1,...,pk)]`.
    fn from_str(s: &str) -> Result<Endpoint> {
        match s.trim().strip_prefix("cf:") {
            Some(cf) => {
                let cf: ContinuedFraction = cf.parse()?;
                if cf.is_periodic() {
                    Ok(Endpoint::Quadratic(QuadraticIrrational::from_periodic_cf(&cf)?))
                } else {
                    let (n, d) = cf.value().ok_or_else(|| Error::Parse(s.to_string()))?;
                    Ok(Endpoint::Rational(Slope::from_bigints(&n, &d)?))
                }
            }
            None => Ok(Endpoint::Rational(s.parse()?)),
        }
    }
}

/// The number of Farey edges with an endpoint at `annulus` crossed by the
/// geodesic between two boundary points. This is the annular coefficient
/// read off the continued fractions; it differs from the twist-coordinate
/// distance by a small additive constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnularCoefficient {
    pub annulus: Slope,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedCombinatorics {
    pub bounded: bool,
    pub witness: Option<AnnularCoefficient>,
}

/// True iff every annular coefficient between `x` and `y` is below `k`.
pub fn bounded_combinatorics(x: &Endpoint, y: &Endpoint, k: u64) -> Result<BoundedCombinatorics> {
    let coeffs = annular_coefficients(x, y)?;
    let witness = coeffs.into_iter().fold(None::<AnnularCoefficient>, |best, c| match best {
        Some(b) if b.value >= c.value => Some(b),
        _ => Some(c),
    });
    let bounded = witness.as_ref().is_none_or(|w| w.value < k);
    Ok(BoundedCombinatorics { bounded, witness })
}

type BigV = (BigInt, BigInt);

fn canon_big(v: BigV) -> BigV {
    if v.1.is_negative() || (v.1.is_zero() && v.0.is_negative()) {
        (-v.0, -v.1)
    } else {
        v
    }
}

/// Integer matrix of determinant ±1 acting by Möbius transformations.
#[derive(Clone, Debug)]
struct Pgl([BigInt; 4]);

impl Pgl {
    fn identity() -> Pgl {
        Pgl([BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()])
    }
    fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Pgl {
        Pgl([a, b, c, d])
    }
    fn compose(&self, o: &Pgl) -> Pgl {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        Pgl([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
    fn inverse(&self) -> Pgl {
        let [a, b, c, d] = &self.0;
        Pgl([d.clone(), -b, -c, a.clone()])
    }
    fn vec(&self, v: &BigV) -> BigV {
        let [a, b, c, d] = &self.0;
        canon_big((a * &v.0 + b * &v.1, c * &v.0 + d * &v.1))
    }
    fn endpoint(&self, e: &Ep) -> Ep {
        let [a, b, c, d] = &self.0;
        match e {
            Ep::R(v) => Ep::R(self.vec(v)),
            Ep::Q(x) => Ep::Q(x.mobius(a, b, c, d)),
        }
    }
}

#[derive(Clone, Debug)]
enum Ep {
    R(BigV),
    Q(QuadraticIrrational),
}

impl Ep {
    fn cf(&self) -> ContinuedFraction {
        match self {
            Ep::R((p, q)) => {
                let mut entries = Vec::new();
                let (mut p, mut q) = (p.clone(), q.clone());
                while !q.is_zero() {
                    let a = p.div_floor(&q);
                    let r = &p - &a * &q;
                    entries.push(a);
                    p = q;
                    q = r;
                }
                ContinuedFraction::finite(entries)
            }
            Ep::Q(x) => x.continued_fraction(),
        }
    }

    fn floor(&self) -> BigInt {
        match self {
            Ep::R((p, q)) => p.div_floor(q),
            Ep::Q(x) => x.floor(),
        }
    }

    fn negate(&self) -> Ep {
        let m1 = -BigInt::one();
        Pgl::new(m1, BigInt::zero(), BigInt::zero(), BigInt::one()).endpoint(self)
    }
}

/// Accumulates crossed-edge incidences per vertex, in normalised coordinates.
struct Ladder {
    counts: BTreeMap<BigV, u64>,
    incomplete: Vec<BigV>,
}

impl Ladder {
    fn edge(&mut self, u: BigV, v: BigV) {
        *self.counts.entry(u).or_insert(0) += 1;
        *self.counts.entry(v).or_insert(0) += 1;
    }

    /// Edges of one side of the ladder for a point with expansion `cf`,
    /// seen from an edge at infinity. `from_infinity` includes the fan
    /// about infinity itself. `map` places vertices into the shared frame;
    /// `endpoint` (for rationals) is excluded.
    fn side(&mut self, cf: &ContinuedFraction, from_infinity: bool, map: impl Fn(BigV) -> BigV) {
        let entries: Vec<BigInt> = if cf.is_periodic() {
            cf.iter_entries().take(cf.head.len() + 2 * cf.period.len() + 2).cloned().collect()
        } else {
            cf.head.clone()
        };
        let endpoint = if cf.is_periodic() { None } else { ContinuedFraction::finite(entries.clone()).value() };
        // convergents p_{-2}/q_{-2} = 0/1, p_{-1}/q_{-1} = 1/0
        let (mut prev, mut cur) = ((BigInt::zero(), BigInt::one()), (BigInt::one(), BigInt::zero()));
        for (idx, a) in entries.iter().enumerate() {
            // entry a_idx is the fan size at convergent p_{idx-1}
            let emit = from_infinity || idx >= 1;
            let mut j = BigInt::one();
            while emit && &j <= a {
                let w = canon_big((&j * &cur.0 + &prev.0, &j * &cur.1 + &prev.1));
                if endpoint.as_ref().map(|e| canon_big(e.clone())) != Some(w.clone()) {
                    self.edge(map(cur.clone()), map(w));
                }
                j += 1;
            }
            let next = (a * &cur.0 + &prev.0, a * &cur.1 + &prev.1);
            prev = std::mem::replace(&mut cur, next);
        }
        if cf.is_periodic() {
            self.incomplete.push(map(canon_big(cur)));
        }
    }
}

/// Crossed-edge counts at every interior vertex of the Farey ladder between
/// `x` and `y`. For quadratic irrationals the ladder is eventually periodic
/// and one preperiod plus two periods are reported.
pub fn annular_coefficients(x: &Endpoint, y: &Endpoint) -> Result<Vec<AnnularCoefficient>> {
    if x == y {
        return Err(Error::Precondition("endpoints must differ".into()));
    }
    let to_ep = |e: &Endpoint| match e {
        Endpoint::Rational(s) => Ep::R((BigInt::from(s.p()), BigInt::from(s.q()))),
        Endpoint::Quadratic(q) => Ep::Q(q.clone()),
    };
    let mut ladder = Ladder { counts: BTreeMap::new(), incomplete: Vec::new() };
    // `back` maps normalised coordinates to the original ones.
    let back: Pgl;
    match (x, y) {
        (Endpoint::Rational(r), other) | (other, Endpoint::Rational(r)) => {
            let f = AnnularFrame::new(*r);
            let [a, b, c, d] = f.matrix().entries();
            let fwd = Pgl::new(a.clone(), b.clone(), c.clone(), d.clone());
            let other = fwd.endpoint(&to_ep(other));
            back = fwd.inverse();
            ladder.side(&other.cf(), false, |v| v);
        }
        (Endpoint::Quadratic(_), Endpoint::Quadratic(_)) => {
            let (mut ex, mut ey) = (to_ep(x), to_ep(y));
            let mut inv = Pgl::identity();
            loop {
                let (fx, fy) = (ex.floor(), ey.floor());
                if fx == fy {
                    // z -> 1/(z - a)
                    let t = Pgl::new(BigInt::zero(), BigInt::one(), BigInt::one(), -&fx);
                    ex = t.endpoint(&ex);
                    ey = t.endpoint(&ey);
                    inv = inv.compose(&t.inverse());
                } else {
                    let m = fx.min(fy) + 1;
                    let t = Pgl::new(BigInt::one(), -&m, BigInt::zero(), BigInt::one());
                    ex = t.endpoint(&ex);
                    ey = t.endpoint(&ey);
                    inv = inv.compose(&t.inverse());
                    break;
                }
            }
            // now one point is negative and the other positive; the edge 0-inf separates them
            let (pos, neg) = if ex.floor().is_negative() { (ey, ex) } else { (ex, ey) };
            ladder.edge((BigInt::zero(), BigInt::one()), (BigInt::one(), BigInt::zero()));
            ladder.side(&pos.cf(), true, |v| v);
            ladder.side(&neg.negate().cf(), true, |v| canon_big((-v.0, v.1)));
            back = inv;
        }
    }
    let mut out = Vec::new();
    for (v, value) in ladder.counts {
        if ladder.incomplete.contains(&v) {
            continue;
        }
        let (p, q) = back.vec(&v);
        out.push(AnnularCoefficient { annulus: Slope::from_bigints(&p, &q)?, value });
    }
    out.sort_by(|a, b| real_order(&a.annulus, &b.annulus));
    Ok(out)
}

/// Order by real value with infinity last.
fn real_order(x: &Slope, y: &Slope) -> std::cmp::Ordering {
    let l = x.p() as i128 * y.q() as i128;
    let r = y.p() as i128 * x.q() as i128;
    (x.is_infinite(), l).cmp(&(y.is_infinite(), r))
}
