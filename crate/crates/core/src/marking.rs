//! The torus marking graph.
//!
//! A marking is an ordered pair of slopes meeting once. Each vertex has
//! three elementary moves: the two Dehn twists of the transversal about the
//! base, and the flip that exchanges base and transversal.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::farey::{intersection_number, Mat2, Slope};

pub const DEFAULT_BFS_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking {
    base: Slope,
    transversal: Slope,
}

impl Marking {
    pub fn new(base: Slope, transversal: Slope) -> Result<Marking> {
        if intersection_number(&base, &transversal) != 1 {
            return Err(Error::InvalidMarking(format!("{base}|{transversal}")));
        }
        Ok(Marking { base, transversal })
    }

    pub fn base(&self) -> Slope {
        self.base
    }

    pub fn transversal(&self) -> Slope {
        self.transversal
    }

    pub fn contains(&self, s: &Slope) -> bool {
        self.base == *s || self.transversal == *s
    }

    /// Twist the transversal once about the base: `t -> t + sign * b` in homology.
    pub fn twist(&self, sign: i64) -> Marking {
        let (p, q) = (self.base.p() as i128, self.base.q() as i128);
        let (r, s) = (self.transversal.p() as i128, self.transversal.q() as i128);
        let sign = sign.signum() as i128;
        let t = Slope::from_i128(r + sign * p, s + sign * q).expect("twisted slope fits");
        Marking { base: self.base, transversal: t }
    }

    pub fn flip(&self) -> Marking {
        Marking { base: self.transversal, transversal: self.base }
    }

    /// Positive twist, negative twist, flip.
    pub fn elementary_moves(&self) -> [Marking; 3] {
        [self.twist(1), self.twist(-1), self.flip()]
    }

    pub fn is_elementary_move(&self, other: &Marking) -> bool {
        self.elementary_moves().contains(other)
    }

    pub fn apply(&self, m: &Mat2) -> Result<Marking> {
        Ok(Marking { base: m.apply(&self.base)?, transversal: m.apply(&self.transversal)? })
    }

    /// Largest height among the two slopes.
    pub fn height(&self) -> i64 {
        self.base.height().max(self.transversal.height())
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.base, self.transversal)
    }
}

impl FromStr for Marking {
    type Err = Error;

    fn from_str(s: &str) -> Result<Marking> {
        let (b, t) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("bad marking {s:?}, expected p/q|r/s")))?;
        Marking::new(b.parse()?, t.parse()?)
    }
}

/// One fan of the strip of Farey triangles between two markings: `count`
/// consecutive triangles all sharing the vertex `pivot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fan {
    pub pivot: Slope,
    pub count: u64,
}

/// Exact distance in the marking graph.
///
/// Markings are oriented Farey edges. Any path between two of them must
/// cross, in order, every triangle separating the two edges in the dual
/// tree; each crossing is one twist about the shared vertex, and the base
/// can only change by a flip. The distance is therefore the number of
/// triangles crossed plus the number of times the required base changes.
pub fn marking_distance(m1: &Marking, m2: &Marking) -> Result<u64> {
    let strip = triangle_strip(m1, m2);
    if strip.fans.is_empty() {
        return Ok(if m1 == m2 { 0 } else { 1 });
    }
    let mut bases = vec![m1.base];
    bases.extend(strip.fans.iter().map(|f| f.pivot));
    bases.push(m2.base);
    let flips = bases.windows(2).filter(|w| w[0] != w[1]).count() as u64;
    let twists: u64 = strip.fans.iter().map(|f| f.count).sum();
    Ok(twists + flips)
}

/// Triangles crossed going from the edge of `m1` to the edge of `m2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleStrip {
    pub fans: Vec<Fan>,
}

type V = (i128, i128);

fn canon(v: V) -> V {
    if v.1 < 0 || (v.1 == 0 && v.0 < 0) {
        (-v.0, -v.1)
    } else {
        v
    }
}

pub fn triangle_strip(m1: &Marking, m2: &Marking) -> TriangleStrip {
    let (b, t) = (m1.base, m1.transversal);
    let (bp, bq, tp, tq) = (b.p() as i128, b.q() as i128, t.p() as i128, t.q() as i128);
    // inverse of [[bp, tp], [bq, tq]] up to sign: sends b to infinity and t to 0
    let to_frame = |s: Slope| canon((tq * s.p() as i128 - tp * s.q() as i128, -bq * s.p() as i128 + bp * s.q() as i128));
    let from_frame = |v: V| Slope::from_i128(bp * v.0 + tp * v.1, bq * v.0 + tq * v.1).expect("pivot fits");
    let mut x = to_frame(m2.base);
    let mut y = to_frame(m2.transversal);
    let (zero, inf) = ((0i128, 1i128), (1i128, 0i128));
    if (x == inf && y == zero) || (x == zero && y == inf) {
        return TriangleStrip { fans: Vec::new() };
    }
    // both endpoints lie in one closed half; reflect into [0, inf]
    let flipped = x.0 < 0 || y.0 < 0;
    if flipped {
        x = canon((-x.0, x.1));
        y = canon((-y.0, y.1));
    }
    let less = |a: V, c: V| a.0 * c.1 < c.0 * a.1;
    let (lo, hi) = if less(x, y) { (x, y) } else { (y, x) };
    let (mut l, mut r) = (zero, inf);
    let mut fans = Vec::new();
    let unreflect = |v: V| if flipped { (-v.0, v.1) } else { v };
    while (l, r) != (lo, hi) {
        let m = (l.0 + r.0, l.1 + r.1);
        if !less(m, hi) {
            // hi <= mediant: pivot about l
            let a = hi.0 * l.1 - hi.1 * l.0;
            let c = hi.1 * r.0 - hi.0 * r.1;
            let k = c / a;
            r = (r.0 + k * l.0, r.1 + k * l.1);
            fans.push(Fan { pivot: from_frame(unreflect(l)), count: k as u64 });
        } else {
            let c = lo.1 * r.0 - lo.0 * r.1;
            let e = lo.0 * l.1 - lo.1 * l.0;
            let k = e / c;
            l = (l.0 + k * r.0, l.1 + k * r.1);
            fans.push(Fan { pivot: from_frame(unreflect(r)), count: k as u64 });
        }
    }
    TriangleStrip { fans }
}

/// Distance by bidirectional BFS over the marking graph. Fails with
/// [`Error::Budget`] once more than `budget` states have been discovered;
/// it never returns an approximate answer.
pub fn marking_distance_bfs(m1: &Marking, m2: &Marking, budget: u64) -> Result<u64> {
    if m1 == m2 {
        return Ok(0);
    }
    let mut dist_a: HashMap<Marking, u64> = HashMap::from([(*m1, 0)]);
    let mut dist_b: HashMap<Marking, u64> = HashMap::from([(*m2, 0)]);
    let mut front_a = vec![*m1];
    let mut front_b = vec![*m2];
    loop {
        let expand_a = front_a.len() <= front_b.len();
        let (front, dist, other) = if expand_a {
            (&mut front_a, &mut dist_a, &dist_b)
        } else {
            (&mut front_b, &mut dist_b, &dist_a)
        };
        let mut next = Vec::with_capacity(front.len() * 2);
        let mut best: Option<u64> = None;
        for v in front.iter() {
            let dv = dist[v];
            for w in v.elementary_moves() {
                if let Some(dw) = other.get(&w) {
                    let total = dv + 1 + dw;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                if !dist.contains_key(&w) {
                    dist.insert(w, dv + 1);
                    next.push(w);
                }
            }
        }
        if let Some(b) = best {
            return Ok(b);
        }
        if (dist_a.len() + dist_b.len()) as u64 > budget {
            return Err(Error::Budget { budget });
        }
        *front = next;
    }
}

/// BFS distances from `m` to every marking within `radius`.
pub fn marking_ball(m: &Marking, radius: u64, budget: u64) -> Result<HashMap<Marking, u64>> {
    let mut dist = HashMap::from([(*m, 0u64)]);
    let mut front = vec![*m];
    for d in 1..=radius {
        let mut next = Vec::new();
        for v in &front {
            for w in v.elementary_moves() {
                if !dist.contains_key(&w) {
                    dist.insert(w, d);
                    next.push(w);
                }
            }
        }
        if dist.len() as u64 > budget {
            return Err(Error::Budget { budget });
        }
        front = next;
    }
    Ok(dist)
}
