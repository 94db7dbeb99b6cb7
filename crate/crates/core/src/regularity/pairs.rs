use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::ApproxGraph;

/// Which vertex pairs enter the Hölder-type suprema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSampler {
    /// All pairs are used up to this many vertices.
    pub exhaustive_cap: usize,
    /// Number of random pairs on larger graphs (in addition to every edge).
    pub count: usize,
    pub seed: u64,
}

impl Default for PairSampler {
    fn default() -> Self {
        PairSampler { exhaustive_cap: 600, count: 100_000, seed: 0 }
    }
}

/// Pairs `x != y` with their distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    pub pairs: Vec<(usize, usize)>,
    pub dist: Vec<f64>,
    pub sampled: bool,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Every pair on small graphs. Otherwise every edge, plus `count` seeded
/// pairs: half uniform, half the endpoints of random walks whose length is
/// log-uniform up to the hop count of a quarter diameter, so that short
/// distances are well represented.
pub fn sample_pairs(g: &ApproxGraph, s: &PairSampler) -> PairSet {
    let n = g.len();
    let mut pairs = Vec::new();
    let sampled = n > s.exhaustive_cap;
    if !sampled {
        for x in 0..n {
            for y in x + 1..n {
                pairs.push((x, y));
            }
        }
    } else {
        pairs.extend(g.edges().iter().map(|e| (e[0], e[1])));
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let max_hops = (crate::grid::admissible_r_range(g).1 / g.mesh()).max(1.0);
        let half = s.count / 2;
        while pairs.len() < g.edges().len() + half {
            let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if x != y {
                pairs.push((x, y));
            }
        }
        while pairs.len() < g.edges().len() + s.count {
            let x = rng.gen_range(0..n);
            let steps = (rng.gen_range(0.0..1.0f64) * max_hops.ln()).exp().round() as usize;
            let mut y = x;
            for _ in 0..steps.max(1) {
                let nb = g.neighbors(y);
                y = nb[rng.gen_range(0..nb.len())];
            }
            if y != x {
                pairs.push((x, y));
            }
        }
    }
    let dist = pairs.iter().map(|&(x, y)| g.dist(x, y)).collect();
    PairSet { pairs, dist, sampled }
}
