use std::collections::VecDeque;

use super::graph::ApproxGraph;
use super::metric::BallScratch;
use crate::error::{Error, Result};
use crate::grid::{ball_radius, check_r};
use crate::series::{Reduction, ScalingSeries};
use crate::sets::VertexSet;

/// `S_r = {x : B(x, r) meets S}`.
pub fn r_neighborhood(g: &ApproxGraph, s: &VertexSet, r: f64) -> VertexSet {
    let radius = ball_radius(r, g.mesh());
    let n = g.len();
    if g.factors().is_none() {
        // multi-source BFS, hops * mesh < radius
        let max_hops = ((radius / g.mesh()).ceil() as i64 - 1).max(0) as u32;
        let mut hops = vec![u32::MAX; n];
        let mut queue: VecDeque<usize> = s.iter().collect();
        for &x in &queue {
            hops[x] = 0;
        }
        while let Some(x) = queue.pop_front() {
            if hops[x] >= max_hops {
                continue;
            }
            for &y in g.neighbors(x) {
                if hops[y] == u32::MAX {
                    hops[y] = hops[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        return VertexSet::from_mask(hops.into_iter().map(|h| h != u32::MAX).collect());
    }
    let mut out = VertexSet::empty(n);
    let mut scratch = BallScratch::default();
    let mut ball = Vec::new();
    for x in s.iter() {
        g.metric().ball(g, x, radius, &mut scratch, &mut ball);
        for &(y, _) in &ball {
            out.insert(y);
        }
    }
    out
}

/// Measure-theoretic r-boundary `(E ∩ (E^c)_r) ∪ (E^c ∩ E_r)`. Every vertex of
/// a finite graph is a density point of any set containing it.
pub fn boundary_r_neighborhood(g: &ApproxGraph, e: &VertexSet, r: f64) -> Result<VertexSet> {
    if e.universe() != g.len() {
        return Err(Error::GraphMismatch { expected: g.len(), got: e.universe() });
    }
    if r < g.mesh() * (1.0 - 1e-12) {
        return Err(Error::OutOfRange { what: "r", value: r, lo: g.mesh(), hi: f64::INFINITY });
    }
    let ec = e.complement();
    let e_r = r_neighborhood(g, e, r);
    let ec_r = r_neighborhood(g, &ec, r);
    Ok(e.intersection(&ec_r).union(&ec.intersection(&e_r)))
}

/// Series `r^-codim mu(boundary_r E)` over `r_grid`, reduced by its minimum.
pub fn minkowski_content(g: &ApproxGraph, e: &VertexSet, codim: f64, r_grid: &[f64]) -> Result<ScalingSeries> {
    if r_grid.is_empty() {
        return Err(Error::Empty("r grid"));
    }
    let mut values = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        check_r(g, r)?;
        let b = boundary_r_neighborhood(g, e, r)?;
        values.push(r.powf(-codim) * b.measure(g.measure()));
    }
    Ok(ScalingSeries::new(r_grid.to_vec(), values, Reduction::MinAsLiminf)?.with_fit(None))
}
