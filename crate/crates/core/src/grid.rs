use serde::{Deserialize, Serialize};
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::geometry::ApproxGraph;

/// Default ratio of consecutive scales in geometric grids.
pub const GRID_RATIO: f64 = std::f64::consts::SQRT_2;

/// One real value per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Self {
        GridFunction { values }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        GridFunction { values: vec![c; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    /// Checks the length against a graph and that every value is finite.
    pub fn checked(values: Vec<f64>, g: &ApproxGraph) -> Result<Self> {
        Error::check_len(g.len(), values.len())?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid function value {v} is not finite")));
        }
        Ok(GridFunction { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn check(&self, g: &ApproxGraph) -> Result<()> {
        Error::check_len(g.len(), self.values.len())
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction { values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn shifted(&self, c: f64) -> Self {
        GridFunction { values: self.values.iter().map(|v| v + c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Error::check_len(self.len(), other.len())?;
        Ok(GridFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Error::check_len(self.len(), other.len())?;
        Ok(GridFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `<f, g>_mu`.
    pub fn inner(&self, other: &Self, mu: &[f64]) -> f64 {
        inner(&self.values, &other.values, mu)
    }

    /// `(sum |f|^p mu)^(1/p)`; `p = inf` gives the sup norm.
    pub fn lp_norm(&self, p: f64, mu: &[f64]) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        let s: f64 = self.values.iter().zip(mu).map(|(v, m)| v.abs().powf(p) * m).sum();
        s.powf(1.0 / p)
    }

    pub fn mean(&self, mu: &[f64]) -> f64 {
        self.values.iter().zip(mu).map(|(v, m)| v * m).sum()
    }

    pub fn is_constant(&self) -> bool {
        let (lo, hi) = (self.min(), self.max());
        hi - lo <= 1e-14 * hi.abs().max(lo.abs()).max(1.0)
    }
}

impl Deref for GridFunction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl From<Vec<f64>> for GridFunction {
    fn from(values: Vec<f64>) -> Self {
        GridFunction { values }
    }
}

pub(crate) fn inner(a: &[f64], b: &[f64], mu: &[f64]) -> f64 {
    a.iter().zip(b).zip(mu).map(|((x, y), m)| x * y * m).sum()
}

/// Decreasing geometric grid from `hi` down to `lo` (both included when the
/// ratio divides the range; `lo` is never undershot).
pub fn geometric_grid(lo: f64, hi: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && ratio > 1.0) {
        return Err(Error::InvalidParameter(format!("bad grid [{lo}, {hi}] ratio {ratio}")));
    }
    let steps = ((hi / lo).ln() / ratio.ln() + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| hi / ratio.powi(k as i32)).collect())
}

/// Diameter that bounds the scales free of compactness effects. On a product
/// it is the smaller factor diameter: each coordinate diffusion equilibrates
/// on its own factor.
fn compact_scale(g: &ApproxGraph) -> f64 {
    match g.factors() {
        Some((a, b)) => a.diameter().min(b.diameter()),
        None => g.diameter(),
    }
}

/// Admissible spatial scales `[mesh, diameter / 4]`.
pub fn admissible_r_range(g: &ApproxGraph) -> (f64, f64) {
    (g.mesh(), compact_scale(g) / 4.0)
}

/// Admissible times `[(2 mesh)^d_W, (diameter / 4)^d_W]`.
pub fn admissible_t_window(g: &ApproxGraph) -> (f64, f64) {
    let dw = g.spec().d_w;
    ((2.0 * g.mesh()).powf(dw), (compact_scale(g) / 4.0).powf(dw))
}

/// Decreasing geometric grid with both endpoints, using the fewest steps whose
/// common ratio does not exceed `max_ratio`.
pub fn spanning_grid(lo: f64, hi: f64, max_ratio: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && max_ratio > 1.0) {
        return Err(Error::InvalidParameter(format!("bad grid [{lo}, {hi}] ratio {max_ratio}")));
    }
    let steps = ((hi / lo).ln() / max_ratio.ln() - 1e-9).ceil().max(1.0) as usize;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let mut grid: Vec<f64> = (0..steps).map(|k| hi / ratio.powi(k as i32)).collect();
    grid.push(lo);
    Ok(grid)
}

/// Geometric r-grid spanning the admissible range, ratio at most `sqrt 2`,
/// decreasing.
pub fn default_r_grid(g: &ApproxGraph) -> Result<Vec<f64>> {
    let (lo, hi) = admissible_r_range(g);
    if lo >= hi {
        return Err(Error::Regime(format!("admissible r-range [{lo}, {hi}] is degenerate at level {}", g.level())));
    }
    spanning_grid(lo, hi, GRID_RATIO)
}

/// Geometric t-grid spanning the admissible window, ratio at most `2^(d_W/2)`
/// so that `t^(1/d_W)` moves by at most `sqrt 2` per step, decreasing.
pub fn default_t_grid(g: &ApproxGraph) -> Result<Vec<f64>> {
    let (lo, hi) = admissible_t_window(g);
    if lo >= hi {
        return Err(Error::Regime(format!("admissible t-window [{lo}, {hi}] is degenerate at level {}", g.level())));
    }
    spanning_grid(lo, hi, GRID_RATIO.powf(g.spec().d_w))
}

/// The scales of `grid` within `decades` decades of the mesh, where a liminf
/// as `r -> 0` is read off. Large scales see a small set only through its
/// measure, not its boundary.
pub fn small_scales(grid: &[f64], mesh: f64, decades: f64) -> Vec<f64> {
    let top = mesh * 10f64.powf(decades) * (1.0 + 1e-12);
    grid.iter().copied().filter(|&r| r <= top).collect()
}

/// Radius actually used for the open ball `B(x, r)`: scales sitting on an
/// integer multiple of the mesh are moved up by half a mesh.
pub fn ball_radius(r: f64, mesh: f64) -> f64 {
    let k = r / mesh;
    if (k - k.round()).abs() < 1e-9 {
        r + mesh / 2.0
    } else {
        r
    }
}

pub fn check_r(g: &ApproxGraph, r: f64) -> Result<()> {
    let lo = g.mesh() * (1.0 - 1e-12);
    let hi = g.diameter() * (1.0 + 1e-12);
    if !(r >= lo && r <= hi) {
        return Err(Error::OutOfRange { what: "r", value: r, lo: g.mesh(), hi: g.diameter() });
    }
    Ok(())
}

pub fn check_t_window(g: &ApproxGraph, t: f64) -> Result<()> {
    let (lo, hi) = admissible_t_window(g);
    if !(t >= lo * (1.0 - 1e-9) && t <= hi * (1.0 + 1e-9)) {
        return Err(Error::OutOfRange { what: "t", value: t, lo, hi });
    }
    Ok(())
}
