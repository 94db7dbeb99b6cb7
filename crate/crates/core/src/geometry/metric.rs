use rayon::prelude::*;
use std::collections::VecDeque;

use super::graph::ApproxGraph;

/// Largest graph for which an all-pairs hop table is kept (u16 entries).
pub const HOP_TABLE_CAP: usize = 16_384;

const UNREACHED: u32 = u32::MAX;

/// Hop counts from `source`, truncated at `max_hops` (vertices farther away
/// stay `u32::MAX`).
pub fn bfs_hops(g: &ApproxGraph, source: usize, max_hops: u32) -> Vec<u32> {
    let mut hops = vec![UNREACHED; g.len()];
    hops[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(x) = queue.pop_front() {
        let h = hops[x];
        if h >= max_hops {
            continue;
        }
        for &y in g.neighbors(x) {
            if hops[y] == UNREACHED {
                hops[y] = h + 1;
                queue.push_back(y);
            }
        }
    }
    hops
}

/// Vertices within `max_hops` of `source` with their hop counts, in BFS order.
fn bfs_ball(g: &ApproxGraph, source: usize, max_hops: u32, seen: &mut Vec<u32>, out: &mut Vec<(usize, u32)>) {
    out.clear();
    if seen.len() != g.len() {
        *seen = vec![UNREACHED; g.len()];
    }
    seen[source] = 0;
    out.push((source, 0));
    let mut head = 0;
    while head < out.len() {
        let (x, h) = out[head];
        head += 1;
        if h >= max_hops {
            continue;
        }
        for &y in g.neighbors(x) {
            if seen[y] == UNREACHED {
                seen[y] = h + 1;
                out.push((y, h + 1));
            }
        }
    }
    for &(y, _) in out.iter() {
        seen[y] = UNREACHED;
    }
}

#[derive(Debug)]
enum Kind {
    Table(Vec<u16>),
    Bfs,
    Product { q: f64 },
}

/// Geodesic distances scaled so one edge has length `mesh`. Products combine
/// factor distances in `l^q`, `q = d_W / (d_W - 1)`.
#[derive(Debug)]
pub struct MetricOracle {
    kind: Kind,
}

/// Reusable scratch space for ball queries.
#[derive(Default)]
pub struct BallScratch {
    seen: Vec<u32>,
    hops: Vec<(usize, u32)>,
    fa: Vec<(usize, f64)>,
    fb: Vec<(usize, f64)>,
    inner: Option<Box<(BallScratch, BallScratch)>>,
}

impl MetricOracle {
    pub(crate) fn new(g: &ApproxGraph) -> Self {
        if g.factors().is_some() {
            return MetricOracle { kind: Kind::Product { q: g.spec().product_metric_exponent() } };
        }
        let n = g.len();
        if n > HOP_TABLE_CAP {
            return MetricOracle { kind: Kind::Bfs };
        }
        let mut table = vec![0u16; n * n];
        table.par_chunks_mut(n.max(1)).enumerate().for_each(|(s, row)| {
            for (dst, h) in row.iter_mut().zip(bfs_hops(g, s, UNREACHED)) {
                *dst = h.min(u16::MAX as u32) as u16;
            }
        });
        MetricOracle { kind: Kind::Table(table) }
    }

    pub fn has_table(&self) -> bool {
        matches!(self.kind, Kind::Table(_))
    }

    pub fn dist(&self, g: &ApproxGraph, x: usize, y: usize) -> f64 {
        match &self.kind {
            Kind::Table(t) => t[x * g.len() + y] as f64 * g.mesh(),
            Kind::Bfs => {
                if x == y {
                    return 0.0;
                }
                bfs_hops(g, x, UNREACHED)[y] as f64 * g.mesh()
            }
            Kind::Product { q } => {
                let (a, b) = g.factors().expect("product graph");
                let nb = b.len();
                let da = a.dist(x / nb, y / nb);
                let db = b.dist(x % nb, y % nb);
                combine(da, db, *q)
            }
        }
    }

    /// Distances from `x` to every vertex.
    pub fn row(&self, g: &ApproxGraph, x: usize) -> Vec<f64> {
        match &self.kind {
            Kind::Table(t) => {
                let n = g.len();
                t[x * n..(x + 1) * n].iter().map(|&h| h as f64 * g.mesh()).collect()
            }
            Kind::Bfs => bfs_hops(g, x, UNREACHED).into_iter().map(|h| h as f64 * g.mesh()).collect(),
            Kind::Product { q } => {
                let (a, b) = g.factors().expect("product graph");
                let nb = b.len();
                let ra = a.metric().row(a, x / nb);
                let rb = b.metric().row(b, x % nb);
                let mut out = Vec::with_capacity(g.len());
                for &da in &ra {
                    for &db in &rb {
                        out.push(combine(da, db, *q));
                    }
                }
                out
            }
        }
    }

    /// All `(y, d(x, y))` with `d(x, y) < radius`.
    pub fn ball(&self, g: &ApproxGraph, x: usize, radius: f64, scratch: &mut BallScratch, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if radius <= 0.0 {
            return;
        }
        match &self.kind {
            Kind::Table(_) | Kind::Bfs => {
                // hops * mesh < radius
                let max_hops = ((radius / g.mesh()).ceil() as i64 - 1).clamp(0, u32::MAX as i64 - 1) as u32;
                bfs_ball(g, x, max_hops, &mut scratch.seen, &mut scratch.hops);
                out.extend(scratch.hops.iter().map(|&(y, h)| (y, h as f64 * g.mesh())));
                out.retain(|&(_, d)| d < radius);
            }
            Kind::Product { q } => {
                let (a, b) = g.factors().expect("product graph");
                let nb = b.len();
                let inner = scratch.inner.get_or_insert_with(Default::default);
                let mut fa = std::mem::take(&mut scratch.fa);
                let mut fb = std::mem::take(&mut scratch.fb);
                a.metric().ball(a, x / nb, radius, &mut inner.0, &mut fa);
                b.metric().ball(b, x % nb, radius, &mut inner.1, &mut fb);
                let rq = radius.powf(*q);
                let fbq: Vec<f64> = fb.iter().map(|&(_, db)| db.powf(*q)).collect();
                for &(ya, da) in &fa {
                    let daq = da.powf(*q);
                    for (&(yb, db), &dbq) in fb.iter().zip(&fbq) {
                        let s = daq + dbq;
                        if s < rq {
                            let d = if da == 0.0 { db } else if db == 0.0 { da } else { s.powf(1.0 / q) };
                            out.push((ya * nb + yb, d));
                        }
                    }
                }
                scratch.fa = fa;
                scratch.fb = fb;
            }
        }
    }
}

fn combine(da: f64, db: f64, q: f64) -> f64 {
    if da == 0.0 {
        db
    } else if db == 0.0 {
        da
    } else {
        (da.powf(q) + db.powf(q)).powf(1.0 / q)
    }
}
