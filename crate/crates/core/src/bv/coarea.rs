use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{distinct_values, variations, FunctionalReport, PairBudget};
use crate::geometry::{minkowski_content, ApproxGraph};
use crate::grid::GridFunction;
use crate::series::ScalingSeries;
use crate::sets::VertexSet;

/// `{x : f(x) > t}`.
pub fn level_set(f: &GridFunction, t: f64) -> VertexSet {
    VertexSet::from_mask(f.iter().map(|&v| v > t).collect())
}

/// `P(E) = Var(1_E)` at `lambda` (default `d_H`, i.e. `d_W - kappa` with the
/// critical `kappa`).
pub fn perimeter(g: &ApproxGraph, e: &VertexSet, lambda: Option<f64>, r_grid: &[f64]) -> Result<FunctionalReport> {
    Error::check_len(g.len(), e.universe())?;
    let lambda = lambda.unwrap_or(g.spec().d_w - g.spec().kappa_critical());
    let f = e.indicator();
    let mut rep = variations(g, &[&f], lambda, r_grid, PairBudget::default())?.remove(0);
    rep.functional = "perimeter".into();
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerimeterComparison {
    pub perimeter: FunctionalReport,
    pub minkowski: ScalingSeries,
    /// `P(E) / M(E)`; the smallest constant in `P(E) <= C M(E)`.
    pub constant: f64,
}

/// Perimeter next to the lower Minkowski content of codimension `d_W - kappa`.
pub fn perimeter_vs_minkowski(g: &ApproxGraph, e: &VertexSet, r_grid: &[f64]) -> Result<PerimeterComparison> {
    let codim = g.spec().d_w - g.spec().kappa_critical();
    let perimeter = perimeter(g, e, Some(codim), r_grid)?;
    let minkowski = minkowski_content(g, e, codim, r_grid)?;
    let m = minkowski.summary();
    let constant = if m > 0.0 { perimeter.summary / m } else if perimeter.summary == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(PerimeterComparison { perimeter, minkowski, constant })
}

/// Super-level sets of `f` at a set of thresholds, with their perimeters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetProfile {
    pub thresholds: Vec<f64>,
    /// Width of the threshold interval each set stands for.
    pub weights: Vec<f64>,
    #[serde(skip)]
    pub sets: Vec<VertexSet>,
    pub perimeters: Vec<f64>,
}

impl LevelSetProfile {
    /// `sum_j w_j P(E_{t_j})`.
    pub fn integral(&self) -> f64 {
        self.weights.iter().zip(&self.perimeters).map(|(w, p)| w * p).sum()
    }
}

/// Level sets at the midpoints between consecutive distinct values of `f`.
/// `t -> P(E_t)` is constant on each gap, so the weighted sum is the exact
/// integral. With more than `max_thresholds` gaps the thresholds are taken at
/// evenly spaced quantiles of the value range instead.
pub fn level_set_profile(
    g: &ApproxGraph,
    f: &GridFunction,
    lambda: f64,
    r_grid: &[f64],
    max_thresholds: usize,
) -> Result<LevelSetProfile> {
    f.check(g)?;
    let vals = distinct_values(f);
    let (thresholds, weights): (Vec<f64>, Vec<f64>) = if vals.len() <= max_thresholds.max(1) + 1 {
        vals.windows(2).map(|w| (0.5 * (w[0] + w[1]), w[1] - w[0])).unzip()
    } else {
        let (lo, hi) = (vals[0], vals[vals.len() - 1]);
        let k = max_thresholds.max(1);
        let h = (hi - lo) / k as f64;
        (0..k).map(|j| (lo + (j as f64 + 0.5) * h, h)).unzip()
    };
    let sets: Vec<VertexSet> = thresholds.iter().map(|&t| level_set(f, t)).collect();
    let inds: Vec<GridFunction> = sets.iter().map(|s| s.indicator()).collect();
    let refs: Vec<&GridFunction> = inds.iter().collect();
    let perimeters = if refs.is_empty() {
        Vec::new()
    } else {
        variations(g, &refs, lambda, r_grid, PairBudget::default())?.into_iter().map(|r| r.summary).collect()
    };
    Ok(LevelSetProfile { thresholds, weights, sets, perimeters })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoareaReport {
    /// `int_0^inf Var(1_{E_t}) dt`.
    pub lhs: f64,
    /// `Var(f)`.
    pub rhs: f64,
    /// `rhs / lhs`, 1 when both vanish.
    pub ratio: f64,
    pub profile: LevelSetProfile,
}

/// Both sides of the co-area formula for a nonnegative `f`.
pub fn coarea_check(
    g: &ApproxGraph,
    f: &GridFunction,
    lambda: f64,
    r_grid: &[f64],
    n_thresholds: usize,
) -> Result<CoareaReport> {
    f.check(g)?;
    let min = f.min();
    if min < 0.0 {
        return Err(Error::NegativeValues(min));
    }
    let profile = level_set_profile(g, f, lambda, r_grid, n_thresholds)?;
    let lhs = profile.integral();
    let rhs = variations(g, &[f], lambda, r_grid, PairBudget::default())?.remove(0).summary;
    let ratio = if lhs == 0.0 && rhs == 0.0 { 1.0 } else { rhs / lhs };
    Ok(CoareaReport { lhs, rhs, ratio, profile })
}
