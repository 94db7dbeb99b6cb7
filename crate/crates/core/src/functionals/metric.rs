use super::balls::{ball_integrals, PairBudget};
use super::report::FunctionalReport;
use crate::error::{Error, Result};
use crate::geometry::ApproxGraph;
use crate::grid::GridFunction;
use crate::series::{Reduction, ScalingSeries};

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "p", value: p, lo: 1.0, hi: f64::INFINITY })
    }
}

/// `N^alpha_p(f, r) = r^(-alpha - d_H/p) (sum_{d(x,y) < r} |f(x) - f(y)|^p mu mu)^(1/p)`.
pub fn besov_n(g: &ApproxGraph, f: &GridFunction, p: f64, alpha: f64, r: f64) -> Result<f64> {
    Ok(besov_n_series(g, &[f], p, alpha, &[r], PairBudget::default())?.remove(0).series.values[0])
}

/// `besov_n` along a grid for several functions at once; reduction sup.
pub fn besov_n_series(
    g: &ApproxGraph,
    fs: &[&GridFunction],
    p: f64,
    alpha: f64,
    r_grid: &[f64],
    budget: PairBudget,
) -> Result<Vec<FunctionalReport>> {
    check_p(p)?;
    let raw: Vec<&[f64]> = fs.iter().map(|f| f.values()).collect();
    let bi = ball_integrals(g, &raw, p, r_grid, budget)?;
    let d_h = g.spec().d_h;
    (0..fs.len())
        .map(|fi| {
            let values = r_grid
                .iter()
                .enumerate()
                .map(|(i, &r)| r.powf(-alpha - d_h / p) * bi.total(g, fi, i).powf(1.0 / p))
                .collect();
            let s = ScalingSeries::new(r_grid.to_vec(), values, Reduction::Sup)?.with_fit(None);
            Ok(FunctionalReport::new("besov_N", p, alpha, s, bi.sampled()))
        })
        .collect()
}

/// Korevaar-Schoen `L^1` functional with per-centre ball normalisation:
/// `sum_x mu(x) r^-lambda mu(B(x,r))^-1 sum_{y in B(x,r)} |f(y) - f(x)| mu(y)`.
pub fn ks_seminorm(g: &ApproxGraph, f: &GridFunction, lambda: f64, r: f64) -> Result<f64> {
    Ok(ks_series(g, &[f], lambda, &[r], Reduction::Sup, PairBudget::default())?.remove(0).series.values[0])
}

pub fn ks_series(
    g: &ApproxGraph,
    fs: &[&GridFunction],
    lambda: f64,
    r_grid: &[f64],
    reduction: Reduction,
    budget: PairBudget,
) -> Result<Vec<FunctionalReport>> {
    let raw: Vec<&[f64]> = fs.iter().map(|f| f.values()).collect();
    let bi = ball_integrals(g, &raw, 1.0, r_grid, budget)?;
    (0..fs.len())
        .map(|fi| {
            let values =
                r_grid.iter().enumerate().map(|(i, &r)| r.powf(-lambda) * bi.normalised_total(g, fi, i)).collect();
            let s = ScalingSeries::new(r_grid.to_vec(), values, reduction)?.with_fit(None);
            let name = if reduction == Reduction::MinAsLiminf { "variation" } else { "ks" };
            Ok(FunctionalReport::new(name, 1.0, lambda, s, bi.sampled()))
        })
        .collect()
}

/// `Var(f)`: the ks series at `lambda` over the grid, reduced by its minimum.
pub fn variation(g: &ApproxGraph, f: &GridFunction, lambda: f64, r_grid: &[f64]) -> Result<FunctionalReport> {
    Ok(variations(g, &[f], lambda, r_grid, PairBudget::default())?.remove(0))
}

pub fn variations(
    g: &ApproxGraph,
    fs: &[&GridFunction],
    lambda: f64,
    r_grid: &[f64],
    budget: PairBudget,
) -> Result<Vec<FunctionalReport>> {
    ks_series(g, fs, lambda, r_grid, Reduction::MinAsLiminf, budget)
}

/// `M_r f(y) = r^-(d_H + d_W - kappa) sum_{x in B(y,r)} |f(x) - f(y)| mu(x)`.
pub fn local_mean_m(g: &ApproxGraph, f: &GridFunction, kappa: f64, r: f64) -> Result<GridFunction> {
    Ok(local_mean_m_grid(g, &[f], kappa, &[r])?.remove(0).remove(0))
}

/// `M_r f` for every function (outer) and radius (inner).
pub fn local_mean_m_grid(
    g: &ApproxGraph,
    fs: &[&GridFunction],
    kappa: f64,
    r_grid: &[f64],
) -> Result<Vec<Vec<GridFunction>>> {
    let raw: Vec<&[f64]> = fs.iter().map(|f| f.values()).collect();
    let exact = PairBudget { max_pair_ops: u64::MAX, seed: 0 };
    let bi = ball_integrals(g, &raw, 1.0, r_grid, exact)?;
    let e = g.spec().d_h + g.spec().d_w - kappa;
    Ok((0..fs.len())
        .map(|fi| {
            r_grid
                .iter()
                .enumerate()
                .map(|(i, &r)| GridFunction::new(bi.a[fi][i].iter().map(|v| r.powf(-e) * v).collect()))
                .collect()
        })
        .collect())
}

/// `max f - min f`.
pub fn osc(f: &GridFunction) -> f64 {
    if f.is_empty() {
        0.0
    } else {
        f.max() - f.min()
    }
}
