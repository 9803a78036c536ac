//! Deterministic sampling of slopes and markings.
//!
//! Every experiment draws from a ChaCha stream keyed by `(seed, stream)`,
//! so two corpora with different stream ids never share draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::farey::Slope;
use crate::marking::Marking;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// A uniformly random slope of height at most `h` (infinity included).
    pub fn slope(&mut self, h: i64) -> Slope {
        loop {
            let q = self.rng.gen_range(0..=h);
            let p = self.rng.gen_range(-h..=h);
            if q == 0 && p != 1 {
                continue;
            }
            if gcd(p, q) != 1 {
                continue;
            }
            return Slope::new(p, q).expect("nonzero");
        }
    }

    /// A finite slope of height at most `h`.
    pub fn finite_slope(&mut self, h: i64) -> Slope {
        loop {
            let s = self.slope(h);
            if !s.is_infinite() {
                return s;
            }
        }
    }

    /// A marking whose base and transversal both have height at most `h`.
    pub fn marking(&mut self, h: i64) -> Marking {
        let base = self.slope(h);
        let nbrs = base.neighbors_within(h);
        let t = nbrs[self.rng.gen_range(0..nbrs.len())];
        Marking::new(base, t).expect("neighbours meet once")
    }

    pub fn marking_pair(&mut self, h: i64) -> (Marking, Marking) {
        (self.marking(h), self.marking(h))
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
