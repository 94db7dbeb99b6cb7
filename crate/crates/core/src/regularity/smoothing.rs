use serde::{Deserialize, Serialize};

use super::verdict::VerdictParams;
use crate::error::{Error, Result};
use crate::families::TestFunction;
use crate::functionals::{heat_besov_norm, heat_pair_integrals};
use crate::geometry::ApproxGraph;
use crate::grid::GridFunction;
use crate::series::spread;
use crate::spectral::{HeatSemigroup, SpectralData};

/// `beta_p = (1 - 2/p) kappa / d_W + 1/p`.
pub fn beta_p(p: f64, kappa: f64, d_w: f64) -> f64 {
    (1.0 - 2.0 / p) * kappa / d_w + 1.0 / p
}

/// Ratios of one function along the t-grid and their supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionRatio {
    pub label: String,
    pub values: Vec<f64>,
    pub constant: f64,
}

/// Per-function constants of an inequality across a test family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRatioReport {
    pub p: f64,
    pub kappa: f64,
    pub beta: f64,
    pub t_grid: Vec<f64>,
    pub functions: Vec<FunctionRatio>,
    /// Labels of constant members, left out of the statistics.
    pub skipped: Vec<String>,
    /// max/min of the per-function constants.
    pub spread: f64,
    pub bounded: bool,
}

fn family_report(
    p: f64,
    kappa: f64,
    beta: f64,
    t_grid: &[f64],
    functions: Vec<FunctionRatio>,
    skipped: Vec<String>,
    params: VerdictParams,
) -> FamilyRatioReport {
    let consts: Vec<f64> = functions.iter().map(|f| f.constant).collect();
    let s = if consts.is_empty() { f64::NAN } else { spread(&consts) };
    FamilyRatioReport { p, kappa, beta, t_grid: t_grid.to_vec(), functions, skipped, spread: s, bounded: s < params.threshold }
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty(name));
    }
    Ok(())
}

/// `||P_t f - f||_p / (t^beta_p min_tau tau^-beta_p I_p(f, tau)^(1/p))`, for
/// `p` in {1, 2}.
#[allow(clippy::too_many_arguments)]
pub fn pseudo_poincare_check(
    g: &ApproxGraph,
    heat: &dyn HeatSemigroup,
    family: &[TestFunction],
    p: f64,
    kappa: f64,
    t_grid: &[f64],
    tau_grid: &[f64],
    params: VerdictParams,
) -> Result<FamilyRatioReport> {
    if p != 1.0 && p != 2.0 {
        return Err(Error::OutOfRange { what: "p", value: p, lo: 1.0, hi: 2.0 });
    }
    check_grid("t grid", t_grid)?;
    check_grid("tau grid", tau_grid)?;
    let beta = beta_p(p, kappa, g.spec().d_w);
    let mu = g.measure();
    let mut functions = Vec::new();
    let mut skipped = Vec::new();
    for tf in family {
        tf.f.check(g)?;
        if tf.f.is_constant() {
            skipped.push(tf.label.clone());
            continue;
        }
        let ints = heat_pair_integrals(heat, &[tf.f.values()], p, tau_grid)?.remove(0);
        let bracket = tau_grid
            .iter()
            .zip(&ints)
            .map(|(&tau, &i)| tau.powf(-beta) * i.powf(1.0 / p))
            .fold(f64::INFINITY, f64::min);
        let pt = heat.apply_block(t_grid, &[tf.f.values()]).remove(0);
        let values: Vec<f64> = pt
            .iter()
            .zip(t_grid)
            .map(|(u, &t)| {
                let diff = GridFunction::new(u.iter().zip(tf.f.iter()).map(|(a, b)| a - b).collect());
                diff.lp_norm(p, mu) / (t.powf(beta) * bracket)
            })
            .collect();
        let constant = values.iter().copied().fold(0.0, f64::max);
        functions.push(FunctionRatio { label: tf.label.clone(), values, constant });
    }
    Ok(family_report(p, kappa, beta, t_grid, functions, skipped, params))
}

/// `||P_t f||_{p, beta_p} t^beta_p / ||f||_p`, the Besov norm taken as a sup
/// over `s_grid`; `p >= 2`.
#[allow(clippy::too_many_arguments)]
pub fn pt_smoothing_check(
    g: &ApproxGraph,
    heat: &dyn HeatSemigroup,
    family: &[TestFunction],
    p: f64,
    kappa: f64,
    t_grid: &[f64],
    s_grid: &[f64],
    params: VerdictParams,
) -> Result<FamilyRatioReport> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::OutOfRange { what: "p", value: p, lo: 2.0, hi: f64::INFINITY });
    }
    check_grid("t grid", t_grid)?;
    check_grid("s grid", s_grid)?;
    let beta = beta_p(p, kappa, g.spec().d_w);
    let mu = g.measure();
    let mut functions = Vec::new();
    let mut skipped = Vec::new();
    for tf in family {
        tf.f.check(g)?;
        if tf.f.is_constant() {
            skipped.push(tf.label.clone());
            continue;
        }
        let norm = tf.f.lp_norm(p, mu);
        let pt = heat.apply_block(t_grid, &[tf.f.values()]).remove(0);
        let values = pt
            .into_iter()
            .zip(t_grid)
            .map(|(u, &t)| {
                let b = heat_besov_norm(heat, &GridFunction::new(u), p, beta, s_grid)?.summary;
                Ok(b * t.powf(beta) / norm)
            })
            .collect::<Result<Vec<f64>>>()?;
        let constant = values.iter().copied().fold(0.0, f64::max);
        functions.push(FunctionRatio { label: tf.label.clone(), values, constant });
    }
    Ok(family_report(p, kappa, beta, t_grid, functions, skipped, params))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Set when `f` is constant and both sides vanish.
    pub skipped: bool,
}

/// `||f||_{p,alpha}` (sup over `t_grid`) against `||(-L)^alpha f||_p`, after
/// removing the mean of `f`.
pub fn riesz_check(sd: &SpectralData, f: &GridFunction, p: f64, alpha: f64, t_grid: &[f64]) -> Result<RieszReport> {
    Error::check_len(sd.len(), f.len())?;
    let mu = sd.measure();
    let f0 = f.shifted(-f.mean(mu));
    let scale = f.sup_norm().max(f64::MIN_POSITIVE);
    if f0.sup_norm() <= 1e-13 * scale {
        return Ok(RieszReport { lhs: 0.0, rhs: 0.0, ratio: f64::NAN, skipped: true });
    }
    let lhs = heat_besov_norm(sd, &f0, p, alpha, t_grid)?.summary;
    let rhs = sd.fractional_power_apply(alpha, &f0)?.lp_norm(p, mu);
    Ok(RieszReport { lhs, rhs, ratio: lhs / rhs, skipped: false })
}
