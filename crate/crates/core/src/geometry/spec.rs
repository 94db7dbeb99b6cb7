use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Topological-Hausdorff dimension of the standard carpet, `ln 2 / ln 3 + 1`.
pub fn carpet_topological_hausdorff_dim() -> f64 {
    2f64.ln() / 3f64.ln() + 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FractalKind {
    Vicsek,
    Gasket,
    CarpetGraph,
    Product(Box<FractalSpec>, Box<FractalSpec>),
}

/// Static description of a self-similar family: subdivision data, renormalisation
/// constants and the dimensions they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractalSpec {
    pub kind: FractalKind,
    /// Cells per subdivision, `N`.
    pub cell_count: u64,
    /// Linear contraction `1/L` per level.
    pub length_ratio: u64,
    /// Per-level conductance renormalisation `rho`.
    pub resistance_factor: f64,
    /// Per-level time scaling `tau` (`N * rho` for self-similar specs).
    pub time_factor: f64,
    pub d_h: f64,
    pub d_w: f64,
    pub d_th: Option<f64>,
}

impl FractalSpec {
    fn self_similar(kind: FractalKind, n: u64, l: u64, rho: f64, d_th: Option<f64>) -> Self {
        let tau = n as f64 * rho;
        let ln_l = (l as f64).ln();
        FractalSpec {
            kind,
            cell_count: n,
            length_ratio: l,
            resistance_factor: rho,
            time_factor: tau,
            d_h: (n as f64).ln() / ln_l,
            d_w: tau.ln() / ln_l,
            d_th,
        }
    }

    pub fn vicsek() -> Self {
        Self::self_similar(FractalKind::Vicsek, 5, 3, 3.0, None)
    }

    pub fn gasket() -> Self {
        Self::self_similar(FractalKind::Gasket, 3, 2, 5.0 / 3.0, None)
    }

    /// The carpet has no exact renormalisation constant; `rho` and `tau` are
    /// estimates supplied by the caller.
    pub fn carpet_graph(rho: f64, tau: f64) -> Result<Self> {
        if !(rho > 0.0 && tau > 0.0 && rho.is_finite() && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "carpet (rho, tau) must be positive, got ({rho}, {tau})"
            )));
        }
        let ln3 = 3f64.ln();
        Ok(FractalSpec {
            kind: FractalKind::CarpetGraph,
            cell_count: 8,
            length_ratio: 3,
            resistance_factor: rho,
            time_factor: tau,
            d_h: 8f64.ln() / ln3,
            d_w: tau.ln() / ln3,
            d_th: Some(carpet_topological_hausdorff_dim()),
        })
    }

    /// Product of two copies of a spec. The walk dimension is shared, the
    /// Hausdorff dimension adds.
    pub fn product(a: &FractalSpec, b: &FractalSpec) -> Result<Self> {
        if a != b {
            return Err(Error::SpecMismatch(a.name(), b.name()));
        }
        Ok(FractalSpec {
            kind: FractalKind::Product(Box::new(a.clone()), Box::new(b.clone())),
            cell_count: a.cell_count * b.cell_count,
            length_ratio: a.length_ratio,
            resistance_factor: a.resistance_factor,
            time_factor: a.time_factor,
            d_h: a.d_h + b.d_h,
            d_w: a.d_w,
            d_th: None,
        })
    }

    pub fn name(&self) -> String {
        match &self.kind {
            FractalKind::Vicsek => "vicsek".into(),
            FractalKind::Gasket => "gasket".into(),
            FractalKind::CarpetGraph => "carpet_graph".into(),
            FractalKind::Product(a, b) => format!("{}x{}", a.name(), b.name()),
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self.kind, FractalKind::Product(..))
    }

    /// `d_W - d_H`, the Hölder exponent of the semigroup on nested fractals.
    pub fn kappa_critical(&self) -> f64 {
        match &self.kind {
            FractalKind::Product(a, _) => a.d_w - a.d_h,
            _ => self.d_w - self.d_h,
        }
    }

    /// Exponent of the product metric, `d_W / (d_W - 1)`.
    pub fn product_metric_exponent(&self) -> f64 {
        self.d_w / (self.d_w - 1.0)
    }

    /// Sub-Gaussian regime `d_W >= 2`; reported, never enforced.
    pub fn is_sub_gaussian(&self) -> bool {
        self.d_w >= 2.0 - 1e-12
    }
}

impl fmt::Display for FractalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (N={}, L={}, rho={:.6}, tau={:.6}, d_H={:.6}, d_W={:.6})",
            self.name(),
            self.cell_count,
            self.length_ratio,
            self.resistance_factor,
            self.time_factor,
            self.d_h,
            self.d_w
        )
    }
}

/// Looks up a spec by identifier. The vicsek and gasket constants are checked
/// against the resistance renormalisation computed on the level-0/level-1 networks.
pub fn build_spec(name: &str, carpet_params: Option<(f64, f64)>) -> Result<FractalSpec> {
    let spec = match name {
        "vicsek" => FractalSpec::vicsek(),
        "gasket" => FractalSpec::gasket(),
        "carpet_graph" | "carpet" => {
            let (rho, tau) = carpet_params.ok_or(Error::MissingCarpetParams)?;
            return FractalSpec::carpet_graph(rho, tau);
        }
        other => return Err(Error::UnknownFractal(other.to_string())),
    };
    let rho = super::graph::renormalization_factor(&spec.kind)?;
    if (rho - spec.resistance_factor).abs() > 1e-9 * spec.resistance_factor {
        return Err(Error::Solver(format!(
            "renormalisation oracle gives rho = {rho}, table says {}",
            spec.resistance_factor
        )));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_follow_from_constants() {
        let g = build_spec("gasket", None).unwrap();
        assert!((g.d_h - 3f64.ln() / 2f64.ln()).abs() < 1e-12);
        assert!((g.d_w - 5f64.ln() / 2f64.ln()).abs() < 1e-12);
        assert!((g.time_factor - 5.0).abs() < 1e-12);
        let v = build_spec("vicsek", None).unwrap();
        assert!((v.d_h - 5f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((v.d_w - 15f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((v.d_w - 2.46497).abs() < 1e-5);
        assert!((v.kappa_critical() - 1.0).abs() < 1e-12);
        assert!(g.is_sub_gaussian() && v.is_sub_gaussian());
    }

    #[test]
    fn carpet_requires_params() {
        assert!(matches!(build_spec("carpet_graph", None), Err(Error::MissingCarpetParams)));
        let c = build_spec("carpet_graph", Some((1.25, 10.0))).unwrap();
        assert!((c.d_h - 1.89279).abs() < 1e-5);
        assert!((c.d_th.unwrap() - (2f64.ln() / 3f64.ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(build_spec("koch", None), Err(Error::UnknownFractal(_))));
    }

    #[test]
    fn product_adds_hausdorff_dimension() {
        let v = FractalSpec::vicsek();
        let p = FractalSpec::product(&v, &v).unwrap();
        assert!((p.d_h - 2.0 * v.d_h).abs() < 1e-12);
        assert_eq!(p.d_w, v.d_w);
        assert_eq!(p.kappa_critical(), v.kappa_critical());
        assert!(FractalSpec::product(&v, &FractalSpec::gasket()).is_err());
    }
}
