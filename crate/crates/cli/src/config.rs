use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;
use crate::registry::EXPERIMENTS;

/// One harness run: a fractal, a level, the experiments and their parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `vicsek`, `gasket` or `carpet_graph`.
    pub spec: String,
    /// `(rho, tau)`, only for `carpet_graph`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carpet_params: Option<(f64, f64)>,
    /// Run on the square of the fractal instead of the fractal itself.
    #[serde(default)]
    pub product: bool,
    pub level: usize,
    /// Registry ids; `["all"]` runs the whole registry.
    pub experiments: Vec<String>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Largest graph the run may build.
    pub vertices: usize,
    /// Largest graph that gets a dense eigendecomposition; bigger ones use the
    /// Chebyshev engine.
    pub eigen: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { vertices: 40_000, eigen: fractal_bv::spectral::DEFAULT_EIGEN_CAP }
    }
}

/// Module parameters. Grids left unset are derived from the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    /// Restricts the default t-grid to this many decades below its top.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_decades: Option<f64>,
    pub verdict_threshold: f64,
    pub trend_threshold: f64,
    /// Limit on max/min of per-function constants in ratio experiments.
    pub ratio_spread_limit: f64,
    pub pair_sample_size: usize,
    pub blowup_levels: Vec<usize>,
    /// Factor level for the tensorization experiment.
    pub product_level: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            kappa_grid: None,
            alpha_grid: None,
            r_grid: None,
            t_grid: None,
            t_decades: None,
            verdict_threshold: 10.0,
            trend_threshold: 0.05,
            ratio_spread_limit: 20.0,
            pair_sample_size: 100_000,
            blowup_levels: vec![3, 4, 5, 6],
            product_level: 2,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("fractal-bv-out")
}

fn default_jobs() -> usize {
    1
}

impl ExperimentConfig {
    /// Reads TOML, or JSON when the file ends in `.json`.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.experiments.is_empty() {
            return bad("experiments is empty".into());
        }
        for id in &self.experiments {
            if id != "all" && !EXPERIMENTS.iter().any(|e| e.id == id) {
                return bad(format!("unknown experiment `{id}`"));
            }
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        let p = &self.params;
        for (name, grid) in [
            ("kappa_grid", &p.kappa_grid),
            ("alpha_grid", &p.alpha_grid),
            ("r_grid", &p.r_grid),
            ("t_grid", &p.t_grid),
        ] {
            if let Some(g) = grid {
                check_grid(name, g, name != "kappa_grid")?;
            }
        }
        if let Some(d) = p.t_decades {
            if !(d > 0.0 && d.is_finite()) {
                return bad(format!("t_decades = {d} must be positive"));
            }
        }
        if !(p.verdict_threshold > 1.0) || !(p.ratio_spread_limit > 1.0) {
            return bad("verdict_threshold and ratio_spread_limit must exceed 1".into());
        }
        if !(p.trend_threshold >= 0.0) {
            return bad("trend_threshold must be non-negative".into());
        }
        if p.pair_sample_size == 0 {
            return bad("pair_sample_size must be positive".into());
        }
        if p.blowup_levels.is_empty() {
            return bad("blowup_levels is empty".into());
        }
        if !p.blowup_levels.windows(2).all(|w| w[1] > w[0]) {
            return bad("blowup_levels must be strictly increasing".into());
        }
        Ok(())
    }

    /// Registry ids to run, in registry order.
    pub fn experiment_ids(&self) -> Vec<&'static str> {
        let all = self.experiments.iter().any(|e| e == "all");
        EXPERIMENTS.iter().filter(|e| all || self.experiments.iter().any(|x| x == e.id)).map(|e| e.id).collect()
    }

    /// SHA-256 of the canonical JSON form, ignoring where files go.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        c.cache_dir = None;
        c.jobs = 1;
        let bytes = serde_json::to_vec(&c).expect("config serialises");
        hex(&Sha256::digest(bytes))
    }
}

fn check_grid(name: &str, g: &[f64], positive: bool) -> Result<(), HarnessError> {
    if g.is_empty() {
        return Err(HarnessError::Config(format!("{name} is empty")));
    }
    if let Some(v) = g.iter().find(|v| !v.is_finite() || (positive && **v <= 0.0) || **v < 0.0) {
        return Err(HarnessError::Config(format!("{name} has invalid entry {v}")));
    }
    let inc = g.windows(2).all(|w| w[1] > w[0]);
    let dec = g.windows(2).all(|w| w[1] < w[0]);
    if !(inc || dec) {
        return Err(HarnessError::Config(format!("{name} must be strictly monotone")));
    }
    Ok(())
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
spec = "gasket"
level = 2
experiments = ["sanity"]
"#;

    #[test]
    fn minimal_toml_gets_defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        c.validate().unwrap();
        assert_eq!(c.jobs, 1);
        assert_eq!(c.params, Params::default());
        assert_eq!(c.experiment_ids(), vec!["sanity"]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}colour = \"red\"\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = format!("{MINIMAL}[params]\nverdict_treshold = 3.0\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn grids_must_be_nonempty_and_monotone() {
        for grid in ["[]", "[0.1, 0.3, 0.2]", "[0.0, 0.1]"] {
            let text = format!("{MINIMAL}[params]\nr_grid = {grid}\n");
            let c = ExperimentConfig::from_toml(&text).unwrap();
            assert!(matches!(c.validate(), Err(HarnessError::Config(_))), "{grid}");
        }
    }

    #[test]
    fn json_and_toml_agree() {
        let a = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let b = ExperimentConfig::from_json(r#"{"spec": "gasket", "level": 2, "experiments": ["sanity"]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn hash_ignores_locations_but_not_parameters() {
        let a = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let mut b = a.clone();
        b.output_dir = "elsewhere".into();
        b.cache_dir = Some("cache".into());
        b.jobs = 4;
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn all_expands_in_registry_order() {
        let mut c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        c.experiments = vec!["all".into()];
        assert_eq!(c.experiment_ids().len(), EXPERIMENTS.len());
        c.experiments = vec!["riesz".into(), "sanity".into()];
        assert_eq!(c.experiment_ids(), vec!["sanity", "riesz"]);
    }
}
