use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::pairs::{sample_pairs, PairSampler, PairSet};
use super::verdict::{ScaleVerdict, VerdictParams};
use crate::error::{Error, Result};
use crate::families::{wbe_family, TestFunction};
use crate::geometry::{build_graph, product_graph, ApproxGraph, FractalSpec};
use crate::grid::{check_t_window, default_t_grid};
use crate::spectral::{assemble_form, eigendecompose, HeatEngine, HeatSemigroup, ProductHeat};

fn check_grid(g: &ApproxGraph, t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Empty("t grid"));
    }
    t_grid.iter().try_for_each(|&t| check_t_window(g, t))
}

/// `max_pairs |u(x) - u(y)| w(x, y)`.
fn pair_sup(u: &[f64], pairs: &PairSet, w: &[f64]) -> f64 {
    pairs
        .pairs
        .par_iter()
        .zip(w.par_iter())
        .map(|(&(x, y), &w)| (u[x] - u[y]).abs() * w)
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WbeReport {
    pub kappa: f64,
    pub family: Vec<String>,
    /// `H(t)` along the t-grid, with spread and trend.
    pub h: ScaleVerdict,
    /// Family member attaining the supremum at each t.
    pub argmax: Vec<String>,
    pub pairs: usize,
    pub sampled: bool,
}

impl WbeReport {
    pub fn bounded(&self) -> bool {
        self.h.bounded
    }
}

/// `H(t) = sup_{x != y, g} |P_t g(x) - P_t g(y)| t^(kappa/d_W) / (d(x,y)^kappa ||g||_inf)`.
pub fn wbe_ratio(
    g: &ApproxGraph,
    heat: &dyn HeatSemigroup,
    kappa: f64,
    family: &[TestFunction],
    t_grid: &[f64],
    sampler: &PairSampler,
    params: VerdictParams,
) -> Result<WbeReport> {
    if family.is_empty() {
        return Err(Error::Empty("test-function family"));
    }
    check_grid(g, t_grid)?;
    Error::check_len(g.len(), heat.len())?;
    for tf in family {
        tf.f.check(g)?;
        if tf.f.sup_norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("{} has zero sup norm", tf.label)));
        }
    }
    let pairs = sample_pairs(g, sampler);
    let w: Vec<f64> = pairs.dist.iter().map(|d| d.powf(-kappa)).collect();
    let d_w = g.spec().d_w;
    let mut h = vec![0.0; t_grid.len()];
    let mut argmax = vec![String::new(); t_grid.len()];
    for tf in family {
        let pt = heat.apply_block(t_grid, &[tf.f.values()]).remove(0);
        let norm = tf.f.sup_norm();
        for (i, (u, &t)) in pt.iter().zip(t_grid).enumerate() {
            let v = pair_sup(u, &pairs, &w) * t.powf(kappa / d_w) / norm;
            if v > h[i] || argmax[i].is_empty() {
                h[i] = h[i].max(v);
                argmax[i] = tf.label.clone();
            }
        }
    }
    Ok(WbeReport {
        kappa,
        family: family.iter().map(|f| f.label.clone()).collect(),
        h: ScaleVerdict::new(t_grid.to_vec(), h, params),
        argmax,
        pairs: pairs.len(),
        sampled: pairs.sampled,
    })
}

fn sample_vertices(n: usize, k: usize, seed: u64) -> Vec<usize> {
    if n <= k {
        return (0..n).collect();
    }
    let mut v = sample(&mut ChaCha8Rng::seed_from_u64(seed), n, k).into_vec();
    v.sort_unstable();
    v
}

/// `p_t(., z)` for each t.
fn kernel_columns(heat: &dyn HeatSemigroup, ts: &[f64], z: usize) -> Vec<Vec<f64>> {
    let mut e = vec![0.0; heat.len()];
    e[z] = 1.0;
    let mz = heat.measure()[z];
    heat.apply_block(ts, &[&e]).remove(0).into_iter().map(|c| c.into_iter().map(|v| v / mz).collect()).collect()
}

/// `sup_{x,y,z} |p_t(x,z) - p_t(y,z)| t^((kappa + d_H)/d_W) / d(x,y)^kappa` over
/// sampled pairs `(x, y)` and `z_count` seeded third points.
pub fn kernel_holder_check(
    g: &ApproxGraph,
    heat: &dyn HeatSemigroup,
    kappa: f64,
    t_grid: &[f64],
    sampler: &PairSampler,
    z_count: usize,
    params: VerdictParams,
) -> Result<ScaleVerdict> {
    check_grid(g, t_grid)?;
    if z_count == 0 {
        return Err(Error::Empty("triple sample"));
    }
    let pairs = sample_pairs(g, sampler);
    if pairs.is_empty() {
        return Err(Error::Empty("triple sample"));
    }
    let w: Vec<f64> = pairs.dist.iter().map(|d| d.powf(-kappa)).collect();
    let spec = g.spec();
    let mut vals = vec![0.0f64; t_grid.len()];
    for z in sample_vertices(g.len(), z_count, sampler.seed) {
        for (i, col) in kernel_columns(heat, t_grid, z).iter().enumerate() {
            vals[i] = vals[i].max(pair_sup(col, &pairs, &w));
        }
    }
    for (v, &t) in vals.iter_mut().zip(t_grid) {
        *v *= t.powf((kappa + spec.d_h) / spec.d_w);
    }
    Ok(ScaleVerdict::new(t_grid.to_vec(), vals, params))
}

/// `sup_{x,y} d(x,y)^kappa p_t(x,y) / (t^(kappa/d_W) p_ct(x,y))` for `y` in a
/// seeded sample. Entries where `p_ct(., y)` has fallen below `1e-9` of its
/// column maximum are skipped: there both kernels are at rounding level and
/// the true ratio is negligible.
pub fn poly_kernel_bound_check(
    g: &ApproxGraph,
    heat: &dyn HeatSemigroup,
    kappa: f64,
    t_grid: &[f64],
    c: f64,
    y_count: usize,
    seed: u64,
    params: VerdictParams,
) -> Result<ScaleVerdict> {
    check_grid(g, t_grid)?;
    if !(c > 1.0) {
        return Err(Error::OutOfRange { what: "c", value: c, lo: 1.0, hi: f64::INFINITY });
    }
    let k = t_grid.len();
    let ts: Vec<f64> = t_grid.iter().copied().chain(t_grid.iter().map(|t| c * t)).collect();
    let mut vals = vec![0.0f64; k];
    for y in sample_vertices(g.len(), y_count.max(1), seed) {
        let cols = kernel_columns(heat, &ts, y);
        let dk: Vec<f64> = g.metric().row(g, y).into_iter().map(|d| d.powf(kappa)).collect();
        for i in 0..k {
            let (pt, pct) = (&cols[i], &cols[k + i]);
            let floor = 1e-9 * pct.iter().fold(0.0f64, |a, &b| a.max(b));
            let sup = (0..g.len())
                .filter(|&x| pct[x] > floor)
                .map(|x| dk[x] * pt[x].max(0.0) / pct[x])
                .fold(0.0f64, f64::max);
            vals[i] = vals[i].max(sup);
        }
    }
    let d_w = g.spec().d_w;
    for (v, &t) in vals.iter_mut().zip(t_grid) {
        *v /= t.powf(kappa / d_w);
    }
    Ok(ScaleVerdict::new(t_grid.to_vec(), vals, params))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorizationReport {
    pub factor: WbeReport,
    pub product: WbeReport,
    /// The product is bounded whenever the factor is.
    pub consistent: bool,
}

/// wBE on one factor and on its square with the `l^(d_W/(d_W-1))` metric. The
/// product semigroup is applied as `T G T^t` from the factor spectrum.
#[allow(clippy::too_many_arguments)]
pub fn tensorization_check(
    spec: &FractalSpec,
    level: usize,
    kappa: f64,
    sampler: &PairSampler,
    params: VerdictParams,
    family_seed: u64,
    eigen_cap: usize,
    vertex_cap: usize,
) -> Result<TensorizationReport> {
    let fg = build_graph(spec, level, vertex_cap)?;
    let sd = Arc::new(eigendecompose(&assemble_form(&fg)?, eigen_cap)?);
    let factor_heat = HeatEngine::Dense(sd.clone());
    let factor = wbe_ratio(
        &fg,
        &factor_heat,
        kappa,
        &wbe_family(&fg, family_seed)?,
        &default_t_grid(&fg)?,
        sampler,
        params,
    )?;
    let pg = product_graph(fg, build_graph(spec, level, vertex_cap)?, vertex_cap)?;
    let heat = ProductHeat::new(sd.clone(), sd);
    let product =
        wbe_ratio(&pg, &heat, kappa, &wbe_family(&pg, family_seed)?, &default_t_grid(&pg)?, sampler, params)?;
    let consistent = !factor.bounded() || product.bounded();
    Ok(TensorizationReport { factor, product, consistent })
}
