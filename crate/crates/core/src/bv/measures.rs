use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::corner_harmonic;
use crate::functionals::{ks_series, local_mean_m_grid, variations, PairBudget};
use crate::geometry::{build_graph, ApproxGraph, FractalSpec};
use crate::grid::{check_r, spanning_grid, GridFunction, GRID_RATIO};
use crate::series::{Reduction, ScalingSeries};
use crate::spectral::{energy_measure, DirichletForm};

/// `M_r f dmu` at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BVMeasure {
    pub r: f64,
    pub density: Vec<f64>,
    pub total: f64,
}

impl BVMeasure {
    fn new(r: f64, density: Vec<f64>, mu: &[f64]) -> Self {
        let total = density.iter().zip(mu).map(|(d, m)| d * m).sum();
        BVMeasure { r, density, total }
    }
}

pub fn bv_measure(g: &ApproxGraph, f: &GridFunction, kappa: f64, r: f64) -> Result<BVMeasure> {
    f.check(g)?;
    check_r(g, r)?;
    let d = local_mean_m_grid(g, &[f], kappa, &[r])?.remove(0).remove(0);
    Ok(BVMeasure::new(r, d.into_vec(), g.measure()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub grid: Vec<f64>,
    /// `(r, r', sup_x (eps + M_r f) / (eps + M_r' f))` over ordered pairs.
    pub pair_ratios: Vec<(f64, f64, f64)>,
    pub max_ratio: f64,
    pub epsilon: f64,
    pub theta: f64,
}

/// Cross-scale density ratios of the BV measures, mollified by
/// `eps = 1e-12 max density` and restricted to vertices where one of the two
/// densities exceeds `theta = 1e-6 max density`.
pub fn bv_measure_equivalence(
    g: &ApproxGraph,
    f: &GridFunction,
    kappa: f64,
    r_grid: &[f64],
) -> Result<EquivalenceReport> {
    f.check(g)?;
    if r_grid.is_empty() {
        return Err(Error::Empty("r grid"));
    }
    for &r in r_grid {
        check_r(g, r)?;
    }
    if f.is_constant() {
        return Ok(EquivalenceReport {
            grid: r_grid.to_vec(),
            pair_ratios: Vec::new(),
            max_ratio: 1.0,
            epsilon: 0.0,
            theta: 0.0,
        });
    }
    let dens = local_mean_m_grid(g, &[f], kappa, r_grid)?.remove(0);
    let peak = dens.iter().flat_map(|d| d.iter()).fold(0.0f64, |a, &b| a.max(b));
    if peak <= 0.0 {
        return Err(Error::AllZero);
    }
    let (epsilon, theta) = (1e-12 * peak, 1e-6 * peak);
    let mut pair_ratios = Vec::new();
    for (i, a) in dens.iter().enumerate() {
        for (j, b) in dens.iter().enumerate() {
            if i == j {
                continue;
            }
            let sup = a
                .iter()
                .zip(b.iter())
                .filter(|(x, y)| **x > theta || **y > theta)
                .map(|(x, y)| (epsilon + x) / (epsilon + y))
                .fold(0.0f64, f64::max);
            pair_ratios.push((r_grid[i], r_grid[j], sup));
        }
    }
    let max_ratio = pair_ratios.iter().map(|p| p.2).fold(if r_grid.len() == 1 { 1.0 } else { 0.0 }, f64::max);
    Ok(EquivalenceReport { grid: r_grid.to_vec(), pair_ratios, max_ratio, epsilon, theta })
}

/// `max_{x != y} |f(x) - f(y)| / d(x, y)^kappa` over all pairs.
pub fn holder_seminorm(g: &ApproxGraph, f: &GridFunction, kappa: f64) -> Result<f64> {
    f.check(g)?;
    Ok((0..g.len())
        .into_par_iter()
        .map(|x| {
            let row = g.metric().row(g, x);
            (x + 1..g.len()).map(|y| (f[x] - f[y]).abs() / row[y].powf(kappa)).fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyVsBvReport {
    pub energy: f64,
    pub holder: f64,
    /// `Var(f)` at `lambda = d_W - kappa`.
    pub variation: f64,
    /// `E(f, f) / (||f||_{inf,kappa} Var(f))`.
    pub scalar_constant: f64,
    /// `sup_x nu_f(x) / (eps + ||f||_{inf,kappa} envelope(x) mu(x))`.
    pub density_sup: f64,
    /// Per-vertex minimum of `M_r f` over the grid: a heuristic stand-in for
    /// the liminf measure.
    pub envelope: Vec<f64>,
    pub energy_measure: Vec<f64>,
}

/// Energy measure of `f` against the lower envelope of its BV measures.
pub fn energy_vs_bv(form: &DirichletForm<'_>, f: &GridFunction, kappa: f64, r_grid: &[f64]) -> Result<EnergyVsBvReport> {
    let g = form.graph();
    f.check(g)?;
    let nu = energy_measure(form, f)?;
    let energy: f64 = nu.iter().sum();
    let holder = holder_seminorm(g, f, kappa)?;
    let dens = local_mean_m_grid(g, &[f], kappa, r_grid)?.remove(0);
    let envelope: Vec<f64> =
        (0..g.len()).map(|x| dens.iter().map(|d| d[x]).fold(f64::INFINITY, f64::min)).collect();
    let variation =
        variations(g, &[f], g.spec().d_w - kappa, r_grid, PairBudget::default())?.remove(0).summary;
    let scalar_constant = if energy == 0.0 { 0.0 } else { energy / (holder * variation) };
    let mu = g.measure();
    let dom: Vec<f64> = (0..g.len()).map(|x| holder * envelope[x] * mu[x]).collect();
    let eps = 1e-12 * dom.iter().fold(0.0f64, |a, &b| a.max(b));
    let density_sup = nu
        .iter()
        .zip(&dom)
        .map(|(n, d)| if *n == 0.0 { 0.0 } else { n / (eps + d) })
        .fold(0.0f64, f64::max);
    Ok(EnergyVsBvReport { energy, holder, variation, scalar_constant, density_sup, envelope, energy_measure: nu })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub spec: String,
    pub levels: Vec<usize>,
    /// Grid minimum of the ks functional at `lambda = d_H` per level.
    pub values: Vec<f64>,
    pub series: Vec<ScalingSeries>,
}

impl BlowupReport {
    pub fn strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    pub fn spread(&self) -> f64 {
        crate::series::spread(&self.values)
    }
}

/// Harmonic extension of the corner data `(1, 0, ..., 0)` at each level and
/// its variation at `lambda = d_H`, taken over the scales `[2, 8]` meshes of
/// that level (clipped to the diameter).
pub fn sg_harmonic_blowup(spec: &FractalSpec, levels: &[usize], cap: usize) -> Result<BlowupReport> {
    if levels.is_empty() {
        return Err(Error::Empty("level range"));
    }
    let mut values = Vec::new();
    let mut series = Vec::new();
    for &level in levels {
        let g = build_graph(spec, level, cap)?;
        let mut corners = vec![0.0; g.boundary().len()];
        corners[0] = 1.0;
        let f = corner_harmonic(&g, &corners)?;
        let hi = (8.0 * g.mesh()).min(g.diameter());
        let lo = (2.0 * g.mesh()).min(hi);
        let grid = if hi > lo { spanning_grid(lo, hi, GRID_RATIO)? } else { vec![hi] };
        let rep = ks_series(&g, &[&f], spec.d_h, &grid, Reduction::MinAsLiminf, PairBudget::default())?.remove(0);
        values.push(rep.summary);
        series.push(rep.series);
    }
    Ok(BlowupReport { spec: spec.name(), levels: levels.to_vec(), values, series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::besov_n;
    use crate::geometry::DEFAULT_VERTEX_CAP;
    use crate::grid::default_r_grid;
    use crate::spectral::assemble_form;

    #[test]
    fn measure_total_is_the_besov_double_sum() {
        let g = build_graph(&FractalSpec::vicsek(), 3, 20_000).unwrap();
        let f = g.cell(&[4]).unwrap().indicator();
        let kappa = g.spec().kappa_critical();
        for r in [g.mesh(), 0.1, 0.4] {
            let m = bv_measure(&g, &f, kappa, r).unwrap();
            let sum: f64 = m.density.iter().zip(g.measure()).map(|(d, w)| d * w).sum();
            assert!((m.total - sum).abs() <= 1e-12 * sum.max(1.0));
            let b = besov_n(&g, &f, 1.0, g.spec().d_w - kappa, r).unwrap();
            assert!((m.total - b).abs() <= 1e-12 * b.max(1e-300));
            assert!(m.density.iter().all(|&d| d >= 0.0));
        }
        let c = bv_measure(&g, &GridFunction::constant(g.len(), 3.0), kappa, 0.2).unwrap();
        assert_eq!(c.total, 0.0);
    }

    #[test]
    fn equivalence_is_scale_free_and_handles_constants() {
        let g = build_graph(&FractalSpec::vicsek(), 3, 20_000).unwrap();
        let grid: Vec<f64> = default_r_grid(&g).unwrap().into_iter().take(7).collect();
        let f = g.cell(&[0]).unwrap().indicator();
        let a = bv_measure_equivalence(&g, &f, 1.0, &grid).unwrap();
        let b = bv_measure_equivalence(&g, &f.scaled(2.0), 1.0, &grid).unwrap();
        for (x, y) in a.pair_ratios.iter().zip(&b.pair_ratios) {
            assert!((x.2 - y.2).abs() <= 1e-12 * x.2);
        }
        let c = bv_measure_equivalence(&g, &GridFunction::zeros(g.len()), 1.0, &grid).unwrap();
        assert_eq!(c.max_ratio, 1.0);
    }

    #[test]
    fn holder_seminorm_is_homogeneous() {
        let g = build_graph(&FractalSpec::gasket(), 3, 20_000).unwrap();
        let f = GridFunction::new(g.coords().iter().map(|c| c[0]).collect());
        let h = holder_seminorm(&g, &f, 0.7).unwrap();
        assert!((holder_seminorm(&g, &f.scaled(-3.0), 0.7).unwrap() - 3.0 * h).abs() < 1e-12 * h);
        assert_eq!(holder_seminorm(&g, &GridFunction::constant(g.len(), 1.0), 0.7).unwrap(), 0.0);
    }

    #[test]
    fn energy_vs_bv_constant_and_harmonic() {
        let g = build_graph(&FractalSpec::vicsek(), 3, 20_000).unwrap();
        let form = assemble_form(&g).unwrap();
        let grid = default_r_grid(&g).unwrap();
        let c = energy_vs_bv(&form, &GridFunction::constant(g.len(), 1.0), 1.0, &grid).unwrap();
        assert_eq!((c.energy, c.holder, c.density_sup), (0.0, 0.0, 0.0));
        let f = corner_harmonic(&g, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = energy_vs_bv(&form, &f, 1.0, &grid).unwrap();
        assert!(r.energy > 0.0 && r.scalar_constant.is_finite() && r.scalar_constant > 0.0);
    }

    #[test]
    fn blowup_level_one_is_finite() {
        let r = sg_harmonic_blowup(&FractalSpec::gasket(), &[1], DEFAULT_VERTEX_CAP).unwrap();
        assert!(r.values[0] > 0.0 && r.values[0].is_finite());
    }
}
