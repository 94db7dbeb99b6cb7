use serde::{Deserialize, Serialize};

use crate::series::{fit_loglog, spread, ExponentFit};

/// Thresholds separating bounded from divergent scale series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictParams {
    /// Largest admissible max/min ratio.
    pub threshold: f64,
    /// A log-log slope below `-trend_threshold` counts as divergence toward
    /// small scales.
    pub trend_threshold: f64,
}

impl Default for VerdictParams {
    fn default() -> Self {
        VerdictParams { threshold: 10.0, trend_threshold: 0.05 }
    }
}

/// A statistic along a scale grid with its spread, trend and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleVerdict {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub spread: f64,
    pub trend: Option<ExponentFit>,
    /// `spread < threshold`.
    pub bounded: bool,
    /// Trend slope below `-trend_threshold`.
    pub diverging: bool,
}

impl ScaleVerdict {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, params: VerdictParams) -> Self {
        let s = spread(&values);
        let trend = fit_loglog(&grid, &values, None).ok();
        let diverging = trend.is_some_and(|f| f.slope < -params.trend_threshold);
        ScaleVerdict { grid, values, spread: s, trend, bounded: s < params.threshold, diverging }
    }

    pub fn slope(&self) -> Option<f64> {
        self.trend.map(|f| f.slope)
    }
}
