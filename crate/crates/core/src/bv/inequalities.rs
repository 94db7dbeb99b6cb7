use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{osc, variations, PairBudget};
use crate::geometry::ApproxGraph;
use crate::grid::GridFunction;

/// `1* = d_H / (d_H - d_W + kappa)`, defined when `d_W - kappa < d_H`.
pub fn sobolev_exponent(d_h: f64, d_w: f64, kappa: f64) -> Result<f64> {
    let lambda = d_w - kappa;
    if !(lambda < d_h) {
        return Err(Error::Regime(format!(
            "d_W - kappa = {lambda} is not below d_H = {d_h}; use osc_check instead"
        )));
    }
    Ok(d_h / (d_h - lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub exponent: f64,
    /// `||f||_{L^{1*}}`.
    pub lhs: f64,
    /// `Var(f)` at `lambda = d_W - kappa`.
    pub rhs: f64,
    pub ratio: f64,
    /// The seminorm vanishes on constants while the norm does not.
    pub constant_mode: bool,
    /// For indicators `lhs = mu(E)^((d_H - d_W + kappa)/d_H)`: the
    /// isoperimetric form of the inequality.
    pub indicator: bool,
}

pub fn sobolev_check(g: &ApproxGraph, f: &GridFunction, kappa: f64, r_grid: &[f64]) -> Result<SobolevReport> {
    Ok(sobolev_checks(g, &[f], kappa, r_grid)?.remove(0))
}

/// [`sobolev_check`] for a family, sharing one pass over the balls.
pub fn sobolev_checks(g: &ApproxGraph, fs: &[&GridFunction], kappa: f64, r_grid: &[f64]) -> Result<Vec<SobolevReport>> {
    for f in fs {
        f.check(g)?;
    }
    let spec = g.spec();
    let exponent = sobolev_exponent(spec.d_h, spec.d_w, kappa)?;
    let vars = variations(g, fs, spec.d_w - kappa, r_grid, PairBudget::default())?;
    Ok(fs
        .iter()
        .zip(vars)
        .map(|(f, v)| {
            let lhs = f.lp_norm(exponent, g.measure());
            let rhs = v.summary;
            let ratio = if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 1.0 } else { f64::INFINITY };
            let indicator = f.iter().all(|&v| v == 0.0 || v == 1.0);
            SobolevReport { exponent, lhs, rhs, ratio, constant_mode: f.is_constant(), indicator }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscReport {
    pub osc: f64,
    /// `Var(f)` at `lambda = d_H`.
    pub var: f64,
    pub ratio: f64,
}

/// `Osc(f)` against `Var(f)`; needs `d_W - d_H > 0`.
pub fn osc_check(g: &ApproxGraph, f: &GridFunction, r_grid: &[f64]) -> Result<OscReport> {
    f.check(g)?;
    let spec = g.spec();
    if !(spec.kappa_critical() > 0.0) {
        return Err(Error::Regime(format!("d_W - d_H = {} must be positive", spec.kappa_critical())));
    }
    let o = osc(f);
    let var = variations(g, &[f], spec.d_h, r_grid, PairBudget::default())?.remove(0).summary;
    let ratio = if o == 0.0 && var == 0.0 {
        1.0
    } else if var > 0.0 {
        o / var
    } else {
        f64::INFINITY
    };
    Ok(OscReport { osc: o, var, ratio })
}
