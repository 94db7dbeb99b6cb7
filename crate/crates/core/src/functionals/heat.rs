use rayon::prelude::*;

use super::report::FunctionalReport;
use crate::error::{Error, Result};
use crate::geometry::ApproxGraph;
use crate::grid::{check_t_window, GridFunction};
use crate::series::{Reduction, ScalingSeries};
use crate::spectral::HeatSemigroup;

/// Above this many distinct values the `p = 1` integrals use the kernel
/// matrix when the engine provides one.
pub const LAYER_CAKE_MAX: usize = 256;

/// Number of vectors pushed through the semigroup at once.
const BLOCK: usize = 64;

/// Sorted distinct values.
pub fn distinct_values(f: &[f64]) -> Vec<f64> {
    let mut v = f.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Super-level sets `{f > v_j}` for all distinct values but the largest, with
/// the gaps `v_{j+1} - v_j`, so that `|f(x) - f(y)| = sum_j gap_j |1_j(x) - 1_j(y)|`.
pub fn layers(f: &[f64]) -> Vec<(f64, Vec<f64>)> {
    let v = distinct_values(f);
    v.windows(2)
        .map(|w| (w[1] - w[0], f.iter().map(|&x| if x > w[0] { 1.0 } else { 0.0 }).collect()))
        .collect()
}

fn check_ts(ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::Empty("t grid"));
    }
    if let Some(&t) = ts.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::OutOfRange { what: "t", value: t, lo: 0.0, hi: f64::INFINITY });
    }
    Ok(())
}

/// `I_p(f, t) = sum_{x,y} p_t(x,y) |f(x) - f(y)|^p mu(x) mu(y)`, indexed `[f][t]`.
pub fn heat_pair_integrals(heat: &dyn HeatSemigroup, fs: &[&[f64]], p: f64, ts: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_ts(ts)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::OutOfRange { what: "p", value: p, lo: 1.0, hi: f64::INFINITY });
    }
    for f in fs {
        Error::check_len(heat.len(), f.len())?;
    }
    if p == 2.0 {
        return Ok(heat
            .dissipation_block(ts, fs)
            .into_iter()
            .map(|d| d.into_iter().map(|v| 2.0 * v.max(0.0)).collect())
            .collect());
    }
    let has_matrix = heat.has_kernel_matrix();
    let mut out = vec![Vec::new(); fs.len()];
    let mut layered = Vec::new();
    let mut via_matrix = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        if p == 1.0 && (!has_matrix || distinct_values(f).len() <= LAYER_CAKE_MAX) {
            layered.push(i);
        } else {
            via_matrix.push(i);
        }
    }
    for &i in &layered {
        out[i] = vec![0.0; ts.len()];
        let lay = layers(fs[i]);
        for chunk in lay.chunks(BLOCK) {
            let refs: Vec<&[f64]> = chunk.iter().map(|(_, s)| s.as_slice()).collect();
            for ((gap, _), d) in chunk.iter().zip(heat.dissipation_block(ts, &refs)) {
                for (o, v) in out[i].iter_mut().zip(d) {
                    *o += gap * 2.0 * v.max(0.0);
                }
            }
        }
    }
    if via_matrix.is_empty() {
        return Ok(out);
    }
    let mu = heat.measure();
    let n = heat.len();
    for &i in &via_matrix {
        out[i] = vec![0.0; ts.len()];
    }
    // sum over y of mu(y) sum_x p_t(x, y) |f(x) - f(y)|^p mu(x), one kernel column per y
    let column_term = |col: &[f64], y: usize, f: &[f64]| -> f64 {
        let mut s = 0.0;
        for x in 0..n {
            let d = (f[x] - f[y]).abs();
            if d != 0.0 {
                s += col[x] * mu[x] * d.powf(p);
            }
        }
        s * mu[y]
    };
    if has_matrix {
        for (ti, &t) in ts.iter().enumerate() {
            let k = heat.kernel_matrix(t).expect("engine provides kernel matrices");
            for &i in &via_matrix {
                // collected first so the summation order does not depend on the thread count
                let terms: Vec<f64> = (0..n).into_par_iter().map(|y| column_term(k.col_as_slice(y), y, fs[i])).collect();
                out[i][ti] = terms.iter().sum();
            }
        }
    } else {
        let ys: Vec<usize> = (0..n).collect();
        for block in ys.chunks(BLOCK) {
            let units: Vec<Vec<f64>> = block
                .iter()
                .map(|&y| {
                    let mut e = vec![0.0; n];
                    e[y] = 1.0 / mu[y];
                    e
                })
                .collect();
            let refs: Vec<&[f64]> = units.iter().map(|u| u.as_slice()).collect();
            let cols = heat.apply_block(ts, &refs);
            for &i in &via_matrix {
                for ti in 0..ts.len() {
                    out[i][ti] += block.iter().zip(&cols).map(|(&y, c)| column_term(&c[ti], y, fs[i])).sum::<f64>();
                }
            }
        }
    }
    Ok(out)
}

/// Heat-kernel Besov functional `t^-alpha I_p(f, t)^(1/p)`; reduction sup.
pub fn heat_besov_norm(
    heat: &dyn HeatSemigroup,
    f: &GridFunction,
    p: f64,
    alpha: f64,
    t_grid: &[f64],
) -> Result<FunctionalReport> {
    Ok(heat_besov_norms(heat, &[f], p, alpha, t_grid)?.remove(0))
}

pub fn heat_besov_norms(
    heat: &dyn HeatSemigroup,
    fs: &[&GridFunction],
    p: f64,
    alpha: f64,
    t_grid: &[f64],
) -> Result<Vec<FunctionalReport>> {
    let raw: Vec<&[f64]> = fs.iter().map(|f| f.values()).collect();
    let ints = heat_pair_integrals(heat, &raw, p, t_grid)?;
    ints.into_iter()
        .map(|int| {
            let values = t_grid.iter().zip(&int).map(|(&t, &v)| t.powf(-alpha) * v.powf(1.0 / p)).collect();
            let s = ScalingSeries::new(t_grid.to_vec(), values, Reduction::Sup)?.with_fit(None);
            Ok(FunctionalReport::new("heat_besov", p, alpha, s, false))
        })
        .collect()
}

/// `Var_*`: `t^-(1 - kappa/d_W) I_1(f, t)` over the grid, reduced by its minimum.
pub fn var_star(
    g: &ApproxGraph,
    heat: &dyn HeatSemigroup,
    f: &GridFunction,
    kappa: f64,
    t_grid: &[f64],
) -> Result<FunctionalReport> {
    Ok(var_stars(g, heat, &[f], kappa, t_grid)?.remove(0))
}

pub fn var_stars(
    g: &ApproxGraph,
    heat: &dyn HeatSemigroup,
    fs: &[&GridFunction],
    kappa: f64,
    t_grid: &[f64],
) -> Result<Vec<FunctionalReport>> {
    let e = 1.0 - kappa / g.spec().d_w;
    let raw: Vec<&[f64]> = fs.iter().map(|f| f.values()).collect();
    let ints = heat_pair_integrals(heat, &raw, 1.0, t_grid)?;
    ints.into_iter()
        .map(|int| {
            let values = t_grid.iter().zip(&int).map(|(&t, &v)| t.powf(-e) * v).collect();
            let s = ScalingSeries::new(t_grid.to_vec(), values, Reduction::MinAsLiminf)?.with_fit(None);
            Ok(FunctionalReport::new("var_star", 1.0, kappa, s, false))
        })
        .collect()
}

/// `Q_t f(y) = t^-(1 - kappa/d_W) sum_x p_t(x,y) |f(x) - f(y)| mu(x)`.
pub fn local_mean_q(
    g: &ApproxGraph,
    heat: &dyn HeatSemigroup,
    f: &GridFunction,
    kappa: f64,
    t: f64,
) -> Result<GridFunction> {
    f.check(g)?;
    check_t_window(g, t)?;
    let n = g.len();
    let scale = t.powf(-(1.0 - kappa / g.spec().d_w));
    let mut q = vec![0.0; n];
    let lay = layers(f);
    if lay.len() <= LAYER_CAKE_MAX || heat.kernel_matrix(t).is_none() {
        for chunk in lay.chunks(BLOCK) {
            let refs: Vec<&[f64]> = chunk.iter().map(|(_, s)| s.as_slice()).collect();
            let pts = heat.apply_block(&[t], &refs);
            for ((gap, ind), pt) in chunk.iter().zip(&pts) {
                for y in 0..n {
                    let pe = pt[0][y];
                    q[y] += gap * if ind[y] > 0.5 { (1.0 - pe).max(0.0) } else { pe.max(0.0) };
                }
            }
        }
    } else {
        let k = heat.kernel_matrix(t).expect("checked");
        let mu = g.measure();
        q.par_iter_mut().enumerate().for_each(|(y, qy)| {
            *qy = (0..n).map(|x| k[(x, y)] * (f[x] - f[y]).abs() * mu[x]).sum();
        });
    }
    Ok(GridFunction::new(q.into_iter().map(|v| v * scale).collect()))
}
