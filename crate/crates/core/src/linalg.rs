//! Sparse Laplacian plumbing shared by the spectral and harmonic routines.

use crate::error::{Error, Result};
use crate::geometry::ApproxGraph;

/// Weighted graph Laplacian in CSR form: `(A f)(x) = sum_y c_xy (f(x) - f(y))`.
#[derive(Debug, Clone)]
pub struct Laplacian {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    degree: Vec<f64>,
}

impl Laplacian {
    /// Conductance `scale * w_e` on edge `e`.
    pub fn new(g: &ApproxGraph, edge_weights: &[f64], scale: f64) -> Self {
        let n = g.len();
        let mut count = vec![0usize; n + 1];
        for &[a, b] in g.edges() {
            count[a + 1] += 1;
            count[b + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let offsets = count.clone();
        let mut fill = count;
        let m = offsets[n];
        let mut cols = vec![0usize; m];
        let mut weights = vec![0.0; m];
        let mut degree = vec![0.0; n];
        for (&[a, b], &w) in g.edges().iter().zip(edge_weights) {
            let c = scale * w;
            cols[fill[a]] = b;
            weights[fill[a]] = c;
            fill[a] += 1;
            cols[fill[b]] = a;
            weights[fill[b]] = c;
            fill[b] += 1;
            degree[a] += c;
            degree[b] += c;
        }
        Laplacian { offsets, cols, weights, degree }
    }

    pub fn len(&self) -> usize {
        self.degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degree.is_empty()
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[x]..self.offsets[x + 1];
        self.cols[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        for (x, o) in out.iter_mut().enumerate() {
            let mut s = self.degree[x] * f[x];
            for (y, c) in self.row(x) {
                s -= c * f[y];
            }
            *o = s;
        }
    }

    pub fn energy(&self, f: &[f64], g: &[f64]) -> f64 {
        let mut s = 0.0;
        for x in 0..self.len() {
            for (y, c) in self.row(x) {
                if y > x {
                    s += c * (f[x] - f[y]) * (g[x] - g[y]);
                }
            }
        }
        s
    }
}

/// Solves `(A v)(x) = rhs(x)` at free vertices with `v` fixed on `pinned`, by
/// Jacobi-preconditioned conjugate gradients.
pub fn grounded_laplacian_solve(
    g: &ApproxGraph,
    edge_weights: &[f64],
    pinned: &[bool],
    pinned_values: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let lap = Laplacian::new(g, edge_weights, 1.0);
    solve_pinned(&lap, pinned, pinned_values, rhs)
}

pub fn solve_pinned(lap: &Laplacian, pinned: &[bool], pinned_values: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = lap.len();
    if !pinned.iter().any(|&p| p) || !free_region_reaches_pins(lap, pinned) {
        return Err(Error::SingularSystem);
    }
    let mut v: Vec<f64> = (0..n).map(|x| if pinned[x] { pinned_values[x] } else { 0.0 }).collect();
    // b = rhs + contributions of pinned neighbours
    let mut b = vec![0.0; n];
    for x in (0..n).filter(|&x| !pinned[x]) {
        b[x] = rhs[x] + lap.row(x).filter(|&(y, _)| pinned[y]).map(|(y, c)| c * pinned_values[y]).sum::<f64>();
    }
    let apply_free = |p: &[f64], out: &mut [f64]| {
        for x in 0..n {
            out[x] = if pinned[x] {
                0.0
            } else {
                lap.degree[x] * p[x] - lap.row(x).filter(|&(y, _)| !pinned[y]).map(|(y, c)| c * p[y]).sum::<f64>()
            };
        }
    };
    let inv_diag: Vec<f64> = (0..n).map(|x| if pinned[x] { 0.0 } else { 1.0 / lap.degree[x] }).collect();
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let bnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        for i in (0..n).filter(|&i| !pinned[i]) {
            v[i] = 0.0;
        }
        return Ok(v);
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    let max_iter = 20 * n + 100;
    for _ in 0..max_iter {
        apply_free(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= 1e-14 * bnorm {
            break;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    for i in (0..n).filter(|&i| !pinned[i]) {
        v[i] = x[i];
    }
    Ok(v)
}

fn free_region_reaches_pins(lap: &Laplacian, pinned: &[bool]) -> bool {
    let n = lap.len();
    let mut seen = pinned.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&x| pinned[x]).collect();
    while let Some(x) = stack.pop() {
        for (y, c) in lap.row(x) {
            if c > 0.0 && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&s| s)
}
