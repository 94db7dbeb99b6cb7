use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a series over scales is reduced to one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Sup,
    /// Grid minimum standing in for a liminf.
    MinAsLiminf,
    Last,
}

impl Reduction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reduction::Sup => "sup",
            Reduction::MinAsLiminf => "min-as-liminf",
            Reduction::Last => "last",
        }
    }
}

/// Least-squares line through `(ln scale, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Fits `ln v = slope ln s + intercept` over the points with scale inside
/// `window` (all points if `None`). Needs at least four positive values.
pub fn fit_loglog(scales: &[f64], values: &[f64], window: Option<(f64, f64)>) -> Result<ExponentFit> {
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .zip(values)
        .filter(|(&s, &v)| s >= lo && s <= hi && s > 0.0 && v > 0.0)
        .map(|(&s, &v)| (s.ln(), v.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidParameter("fit window spans a single scale".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let used = pts.iter().map(|p| p.0.exp());
    let window = used.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s), b.max(s)));
    Ok(ExponentFit { slope, intercept, residual_rms: (rss / n).sqrt(), window, points: pts.len() })
}

/// Values of a functional along a strictly monotone grid of scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: Option<ExponentFit>,
    pub reduction: Reduction,
}

impl ScalingSeries {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, reduction: Reduction) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Empty("grid"));
        }
        Error::check_len(grid.len(), values.len())?;
        let inc = grid.windows(2).all(|w| w[1] > w[0]);
        let dec = grid.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return Err(Error::InvalidParameter("grid must be strictly monotone".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("series value {v} is not finite")));
        }
        Ok(ScalingSeries { grid, values, fit: None, reduction })
    }

    /// Attaches a log-log fit when enough positive values exist.
    pub fn with_fit(mut self, window: Option<(f64, f64)>) -> Self {
        self.fit = fit_loglog(&self.grid, &self.values, window).ok();
        self
    }

    pub fn summary(&self) -> f64 {
        match self.reduction {
            Reduction::Sup => self.max(),
            Reduction::MinAsLiminf => self.min(),
            Reduction::Last => *self.values.last().expect("nonempty"),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max / min`; 1 for an identically zero series, infinite if only the
    /// minimum vanishes.
    pub fn spread(&self) -> f64 {
        spread(&self.values)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

pub fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    if hi <= 0.0 {
        1.0
    } else if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let s: Vec<f64> = (0..10).map(|k| 0.5f64.powi(k)).collect();
        let v: Vec<f64> = s.iter().map(|x| x * x).collect();
        let fit = fit_loglog(&s, &v, None).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
        assert_eq!(fit.points, 10);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let s = [1.0, 2.0, 4.0, 8.0];
        let fit = fit_loglog(&s, &[3.0; 4], None).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit_loglog(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], None),
            Err(Error::TooFewPoints { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn summary_follows_reduction() {
        let s = ScalingSeries::new(vec![4.0, 2.0, 1.0], vec![1.0, 3.0, 2.0], Reduction::Sup).unwrap();
        assert_eq!(s.summary(), 3.0);
        let s = ScalingSeries { reduction: Reduction::MinAsLiminf, ..s };
        assert_eq!(s.summary(), 1.0);
        assert!(ScalingSeries::new(vec![1.0, 1.0], vec![0.0, 0.0], Reduction::Sup).is_err());
    }
}
