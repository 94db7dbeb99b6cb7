use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ApproxGraph, BallScratch};
use crate::grid::{ball_radius, check_r};

/// Controls exact versus sampled evaluation of the ball double sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairBudget {
    /// Above this many (source, target) pair visits the sum over source
    /// vertices is estimated from a seeded subsample.
    pub max_pair_ops: u64,
    pub seed: u64,
}

impl Default for PairBudget {
    fn default() -> Self {
        PairBudget { max_pair_ops: 2_000_000_000, seed: 0 }
    }
}

/// Per-vertex ball sums for a family of functions:
/// `a[f][i][x] = sum_{d(x,y) < r_i} |f(x) - f(y)|^p mu(y)` and
/// `b[i][x] = mu(B(x, r_i))`, with `r_i` the tie-nudged grid radius.
#[derive(Debug, Clone)]
pub struct BallIntegrals {
    pub radii: Vec<f64>,
    pub a: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
    /// Source vertices actually visited; all of them unless sampled.
    pub sources: Vec<usize>,
    /// Weight turning `sum_{x in sources} mu(x) (.)` into an estimate of the
    /// full sum (1 when exact).
    pub source_weight: f64,
}

impl BallIntegrals {
    pub fn sampled(&self) -> bool {
        self.source_weight != 1.0
    }

    /// `sum_x mu(x) a[f][i][x]`.
    pub fn total(&self, g: &ApproxGraph, f: usize, i: usize) -> f64 {
        let mu = g.measure();
        self.source_weight * self.sources.iter().map(|&x| mu[x] * self.a[f][i][x]).sum::<f64>()
    }

    /// `sum_x mu(x) a[f][i][x] / b[i][x]`.
    pub fn normalised_total(&self, g: &ApproxGraph, f: usize, i: usize) -> f64 {
        let mu = g.measure();
        self.source_weight * self.sources.iter().map(|&x| mu[x] * self.a[f][i][x] / self.b[i][x]).sum::<f64>()
    }
}

fn power(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

/// One pass over the balls of the largest radius, bucketing each pair by the
/// smallest grid radius that still contains it.
pub fn ball_integrals(
    g: &ApproxGraph,
    fs: &[&[f64]],
    p: f64,
    r_grid: &[f64],
    budget: PairBudget,
) -> Result<BallIntegrals> {
    if r_grid.is_empty() {
        return Err(Error::Empty("r grid"));
    }
    if !(p >= 1.0) {
        return Err(Error::OutOfRange { what: "p", value: p, lo: 1.0, hi: f64::INFINITY });
    }
    for f in fs {
        Error::check_len(g.len(), f.len())?;
    }
    for &r in r_grid {
        check_r(g, r)?;
    }
    let n = g.len();
    let radii: Vec<f64> = r_grid.iter().map(|&r| ball_radius(r, g.mesh())).collect();
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&i, &j| radii[j].total_cmp(&radii[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| radii[i]).collect();
    let rmax = sorted[0];
    let metric = g.metric();

    let (sources, source_weight) = {
        let mut scratch = BallScratch::default();
        let mut ball = Vec::new();
        let probes = n.min(16);
        let mut seen = 0usize;
        for k in 0..probes {
            metric.ball(g, k * n / probes, rmax, &mut scratch, &mut ball);
            seen += ball.len();
        }
        let est = (seen as f64 / probes as f64) * n as f64;
        if est > budget.max_pair_ops as f64 {
            let keep = ((budget.max_pair_ops as f64 / est) * n as f64).ceil().max(1.0) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            let mut idx = sample(&mut rng, n, keep.min(n)).into_vec();
            idx.sort_unstable();
            let mu = g.measure();
            let picked: f64 = idx.iter().map(|&x| mu[x]).sum();
            let total: f64 = mu.iter().sum();
            (idx, total / picked)
        } else {
            ((0..n).collect(), 1.0)
        }
    };

    let m = fs.len();
    let k = sorted.len();
    let mu = g.measure();
    // rows[x] = (a buckets [f * k + i], b buckets [i])
    let rows: Vec<(usize, Vec<f64>, Vec<f64>)> = sources
        .par_iter()
        .map_init(
            || (BallScratch::default(), Vec::new()),
            |(scratch, ball), &x| {
                metric.ball(g, x, rmax, scratch, ball);
                let mut a = vec![0.0; m * k];
                let mut b = vec![0.0; k];
                for &(y, d) in ball.iter() {
                    // last sorted index whose radius exceeds d
                    let mut j = 0;
                    while j + 1 < k && sorted[j + 1] > d {
                        j += 1;
                    }
                    b[j] += mu[y];
                    for (fi, f) in fs.iter().enumerate() {
                        let diff = (f[x] - f[y]).abs();
                        if diff != 0.0 {
                            a[fi * k + j] += power(diff, p) * mu[y];
                        }
                    }
                }
                // bucket j counts pairs with sorted[j+1] <= d < sorted[j]; cumulate towards small j
                for j in (0..k - 1).rev() {
                    b[j] += b[j + 1];
                    for fi in 0..m {
                        a[fi * k + j] += a[fi * k + j + 1];
                    }
                }
                (x, a, b)
            },
        )
        .collect();

    let mut a = vec![vec![vec![0.0; n]; k]; m];
    let mut b = vec![vec![0.0; n]; k];
    for (x, ra, rb) in rows {
        for (si, &orig) in order.iter().enumerate() {
            b[orig][x] = rb[si];
            for fi in 0..m {
                a[fi][orig][x] = ra[fi * k + si];
            }
        }
    }
    Ok(BallIntegrals { radii, a, b, sources, source_weight })
}
