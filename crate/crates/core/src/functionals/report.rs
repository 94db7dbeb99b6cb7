use serde::{Deserialize, Serialize};

use crate::series::ScalingSeries;

/// A functional evaluated along a grid of scales, with its reduced value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub functional: String,
    pub p: f64,
    /// `alpha`, `lambda` or `kappa`, depending on the functional.
    pub param: f64,
    pub series: ScalingSeries,
    pub summary: f64,
    /// Set when the double sums were estimated from sampled source vertices.
    pub sampled: bool,
}

impl FunctionalReport {
    pub fn new(functional: &str, p: f64, param: f64, series: ScalingSeries, sampled: bool) -> Self {
        let summary = series.summary();
        FunctionalReport { functional: functional.to_string(), p, param, series, summary, sampled }
    }

    pub const CSV_HEADER: [&'static str; 7] =
        ["functional", "p", "alpha_or_lambda", "scale", "value", "reduction", "summary"];

    /// Flat rows matching [`Self::CSV_HEADER`].
    pub fn csv_rows(&self) -> Vec<[String; 7]> {
        self.series
            .grid
            .iter()
            .zip(&self.series.values)
            .map(|(s, v)| {
                [
                    self.functional.clone(),
                    fmt_num(self.p),
                    fmt_num(self.param),
                    fmt_num(*s),
                    fmt_num(*v),
                    self.series.reduction.as_str().to_string(),
                    fmt_num(self.summary),
                ]
            })
            .collect()
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}
