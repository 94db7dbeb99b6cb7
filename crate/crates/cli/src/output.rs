use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fractal_bv::functionals::FunctionalReport;
use fractal_bv::{Reduction, ScaleVerdict, ScalingSeries};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// What one experiment writes: parameters, the series behind every summary,
/// named summary values and named pass/fail verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub experiment: String,
    pub spec: String,
    pub level: usize,
    pub params: BTreeMap<String, serde_json::Value>,
    pub series: Vec<FunctionalReport>,
    pub summaries: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, bool>,
    /// Set when the experiment does not apply to this fractal or level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl ExperimentOutput {
    pub fn new(experiment: &str, spec: &str, level: usize) -> Self {
        ExperimentOutput {
            experiment: experiment.to_string(),
            spec: spec.to_string(),
            level,
            params: BTreeMap::new(),
            series: Vec::new(),
            summaries: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            skipped: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("parameter serialises"));
        self
    }

    pub fn summary(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.summaries.insert(key.into(), value);
        self
    }

    pub fn verdict(&mut self, key: impl Into<String>, pass: bool) -> &mut Self {
        self.verdicts.insert(key.into(), pass);
        self
    }

    /// Adds a report, prefixing its functional name with `label`.
    pub fn push(&mut self, label: &str, mut report: FunctionalReport) -> &mut Self {
        report.functional = format!("{}:{label}", report.functional);
        self.series.push(report);
        self
    }

    /// Adds a scale verdict as a sup-reduced series.
    pub fn push_verdict(&mut self, functional: &str, label: &str, p: f64, param: f64, v: &ScaleVerdict) -> &mut Self {
        if let Ok(s) = ScalingSeries::new(v.grid.clone(), v.values.clone(), Reduction::Sup) {
            self.push(label, FunctionalReport::new(functional, p, param, s.with_fit(None), false));
        }
        self
    }

    pub fn passed(&self) -> usize {
        self.verdicts.values().filter(|v| **v).count()
    }

    pub fn failed(&self) -> usize {
        self.verdicts.len() - self.passed()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("output serialises");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| HarnessError::io("csv", std::io::Error::other(e));
        w.write_record(FunctionalReport::CSV_HEADER).map_err(io)?;
        for r in &self.series {
            for row in r.csv_rows() {
                w.write_record(&row).map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::io("csv", std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// Files written for one experiment, relative to the run directory.
pub fn file_names(id: &str) -> (String, String) {
    (format!("{id}.json"), format!("{id}.csv"))
}

/// Writes `text` to `dir/name`, creating `dir`.
pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(format!("creating {}", dir.display()), e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| HarnessError::io(format!("writing {}", path.display()), e))?;
    Ok(path)
}
