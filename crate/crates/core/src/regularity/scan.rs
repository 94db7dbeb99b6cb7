use serde::{Deserialize, Serialize};

use super::verdict::VerdictParams;
use crate::error::{Error, Result};
use crate::families::TestFunction;
use crate::functionals::{besov_n_series, PairBudget};
use crate::geometry::ApproxGraph;
use crate::series::{fit_loglog, ExponentFit, ScalingSeries};

/// Log-log fit of a series over `window` (all scales if `None`).
pub fn exponent_fit(series: &ScalingSeries, window: Option<(f64, f64)>) -> Result<ExponentFit> {
    fit_loglog(&series.grid, &series.values, window)
}

/// Classification of one function at one exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub label: String,
    /// Largest value over the grid divided by the value at the coarsest scale.
    pub growth: f64,
    /// Log-log slope over scales `r >= 2 mesh`.
    pub slope: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub alphas: Vec<f64>,
    pub r_grid: Vec<f64>,
    /// `entries[a][f]`.
    pub entries: Vec<Vec<ScanEntry>>,
    /// Largest alpha at which some function stays bounded.
    pub estimate: Option<f64>,
}

impl ScanReport {
    pub fn bounded_at(&self, a: usize) -> bool {
        self.entries[a].iter().any(|e| e.bounded)
    }
}

/// For each `alpha`, classifies `N^(alpha d_W)_1(f, r)` as bounded or growing
/// toward small `r`. A series is bounded when it rises by less than
/// `threshold` over its value at the coarsest scale and its log-log slope over
/// `r >= 2 mesh` is at least `-trend_threshold`. Decay toward small scales
/// counts as bounded. Scales below two meshes stay in the growth statistic
/// but not in the slope, where lattice rounding of the ball radius dominates.
pub fn critical_exponent_scan(
    g: &ApproxGraph,
    family: &[TestFunction],
    alpha_grid: &[f64],
    r_grid: &[f64],
    params: VerdictParams,
    budget: PairBudget,
) -> Result<ScanReport> {
    if alpha_grid.is_empty() {
        return Err(Error::Empty("alpha grid"));
    }
    let (rmin, rmax) = r_grid.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if r_grid.len() < 4 || rmax / rmin < 10.0 * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter("exponent scan needs an r-grid spanning a decade".into()));
    }
    let members: Vec<&TestFunction> = family.iter().filter(|t| !t.f.is_constant()).collect();
    if members.is_empty() {
        return Err(Error::InvalidParameter("test-function family is all constant".into()));
    }
    let fs: Vec<_> = members.iter().map(|t| &t.f).collect();
    let base = besov_n_series(g, &fs, 1.0, 0.0, r_grid, budget)?;
    let coarsest = r_grid.iter().position(|&r| r == rmax).expect("nonempty grid");
    let window = Some((2.0 * g.mesh() * (1.0 - 1e-9), f64::INFINITY));
    let d_w = g.spec().d_w;
    let mut entries = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        let row = members
            .iter()
            .zip(&base)
            .map(|(tf, rep)| {
                let v: Vec<f64> =
                    r_grid.iter().zip(&rep.series.values).map(|(&r, &b)| b * r.powf(-alpha * d_w)).collect();
                let growth = v.iter().copied().fold(0.0, f64::max) / v[coarsest];
                let slope = fit_loglog(r_grid, &v, window)?.slope;
                let bounded = growth < params.threshold && slope >= -params.trend_threshold;
                Ok(ScanEntry { label: tf.label.clone(), growth, slope, bounded })
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    let estimate = alpha_grid
        .iter()
        .zip(&entries)
        .filter(|(_, row)| row.iter().any(|e| e.bounded))
        .map(|(&a, _)| a)
        .fold(None, |acc: Option<f64>, a| Some(acc.map_or(a, |b| b.max(a))));
    Ok(ScanReport { alphas: alpha_grid.to_vec(), r_grid: r_grid.to_vec(), entries, estimate })
}
