//! Dirichlet forms, heat semigroups and spectral calculus.

mod chebyshev;
mod dense;
mod form;
mod product;
mod sanity;

pub use chebyshev::{scaled_bessel_i, ChebyshevHeat};
pub use dense::{eigendecompose, SpectralData, DEFAULT_EIGEN_CAP};
pub use form::{assemble_form, energy_measure, harmonic_extend, DirichletForm};
pub use product::ProductHeat;
pub use sanity::{spectral_sanity, SanityReport};

use faer::Mat;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::ApproxGraph;
use crate::grid::{inner, GridFunction};

/// A conservative symmetric Markov semigroup on a finite measure space.
/// Times passed to the methods must be non-negative.
pub trait HeatSemigroup: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn measure(&self) -> &[f64];

    /// Upper bound on the generator spectrum (exact top eigenvalue on dense data).
    fn lambda_max(&self) -> f64;

    /// `P_t f` for every `t` in `ts` and every `f` in `fs`, indexed `[f][t]`.
    fn apply_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<Vec<f64>>>;

    fn apply(&self, t: f64, f: &[f64]) -> Vec<f64> {
        self.apply_block(&[t], &[f]).pop().and_then(|mut v| v.pop()).unwrap_or_default()
    }

    /// `<f, f> - <f, P_t f>` for every `t`.
    fn dissipation(&self, ts: &[f64], f: &[f64]) -> Vec<f64> {
        let mu = self.measure();
        let ff = inner(f, f, mu);
        self.apply_block(ts, &[f])
            .pop()
            .unwrap_or_default()
            .iter()
            .map(|pf| ff - inner(f, pf, mu))
            .collect()
    }

    /// `dissipation` for several functions, indexed `[f][t]`.
    fn dissipation_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<f64>> {
        let mu = self.measure();
        self.apply_block(ts, fs)
            .iter()
            .zip(fs)
            .map(|(pfs, f)| {
                let ff = inner(f, f, mu);
                pfs.iter().map(|pf| ff - inner(f, pf, mu)).collect()
            })
            .collect()
    }

    /// `p_t(x, y)`.
    fn kernel(&self, t: f64, x: usize, y: usize) -> f64 {
        self.kernel_column(t, y)[x]
    }

    /// `p_t(., y) = P_t 1_y / mu(y)`.
    fn kernel_column(&self, t: f64, y: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.len()];
        e[y] = 1.0;
        let my = self.measure()[y];
        self.apply(t, &e).into_iter().map(|v| v / my).collect()
    }

    /// Full kernel matrix, when the engine can form it cheaply.
    fn kernel_matrix(&self, _t: f64) -> Option<Mat<f64>> {
        None
    }

    /// Whether [`Self::kernel_matrix`] returns `Some`.
    fn has_kernel_matrix(&self) -> bool {
        false
    }
}

/// Whichever engine fits the graph.
#[derive(Debug, Clone)]
pub enum HeatEngine {
    Dense(Arc<SpectralData>),
    Chebyshev(ChebyshevHeat),
    Product(ProductHeat),
}

impl HeatEngine {
    /// Dense eigendecomposition up to `eigen_cap` vertices, the factorised
    /// product engine for product graphs, Chebyshev otherwise.
    pub fn for_graph(g: &ApproxGraph, eigen_cap: usize) -> Result<HeatEngine> {
        if let Some((a, b)) = g.factors() {
            let sa = Arc::new(eigendecompose(&assemble_form(a)?, eigen_cap)?);
            let sb = if a.len() == b.len() && a.spec() == b.spec() {
                sa.clone()
            } else {
                Arc::new(eigendecompose(&assemble_form(b)?, eigen_cap)?)
            };
            return Ok(HeatEngine::Product(ProductHeat::new(sa, sb)));
        }
        let form = assemble_form(g)?;
        if g.len() <= eigen_cap {
            Ok(HeatEngine::Dense(Arc::new(eigendecompose(&form, eigen_cap)?)))
        } else {
            Ok(HeatEngine::Chebyshev(ChebyshevHeat::new(&form)))
        }
    }

    pub fn spectral(&self) -> Option<&SpectralData> {
        match self {
            HeatEngine::Dense(sd) => Some(sd),
            _ => None,
        }
    }

    fn inner(&self) -> &dyn HeatSemigroup {
        match self {
            HeatEngine::Dense(sd) => sd.as_ref(),
            HeatEngine::Chebyshev(c) => c,
            HeatEngine::Product(p) => p,
        }
    }
}

impl HeatSemigroup for HeatEngine {
    fn len(&self) -> usize {
        self.inner().len()
    }
    fn measure(&self) -> &[f64] {
        self.inner().measure()
    }
    fn lambda_max(&self) -> f64 {
        self.inner().lambda_max()
    }
    fn apply_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<Vec<f64>>> {
        self.inner().apply_block(ts, fs)
    }
    fn dissipation(&self, ts: &[f64], f: &[f64]) -> Vec<f64> {
        self.inner().dissipation(ts, f)
    }
    fn dissipation_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<f64>> {
        self.inner().dissipation_block(ts, fs)
    }
    fn kernel(&self, t: f64, x: usize, y: usize) -> f64 {
        self.inner().kernel(t, x, y)
    }
    fn kernel_column(&self, t: f64, y: usize) -> Vec<f64> {
        self.inner().kernel_column(t, y)
    }
    fn has_kernel_matrix(&self) -> bool {
        self.inner().has_kernel_matrix()
    }

    fn kernel_matrix(&self, t: f64) -> Option<Mat<f64>> {
        self.inner().kernel_matrix(t)
    }
}

/// `p_t(x, y)` with argument checks.
pub fn heat_kernel(heat: &dyn HeatSemigroup, t: f64, x: usize, y: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange { what: "t", value: t, lo: 0.0, hi: f64::INFINITY });
    }
    let n = heat.len();
    if x >= n || y >= n {
        return Err(Error::InvalidParameter(format!("vertex out of range for {n} vertices")));
    }
    Ok(heat.kernel(t, x, y))
}

/// `P_t f` with argument checks; `P_0` is the identity.
pub fn semigroup_apply(heat: &dyn HeatSemigroup, t: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(t >= 0.0) {
        return Err(Error::OutOfRange { what: "t", value: t, lo: 0.0, hi: f64::INFINITY });
    }
    Error::check_len(heat.len(), f.len())?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(GridFunction::new(heat.apply(t, f)))
}
