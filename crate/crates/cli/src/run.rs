use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Arc;
use std::time::Instant;

use fractal_bv::grid::{check_r, check_t_window, default_r_grid, default_t_grid};
use fractal_bv::spectral::ProductHeat;
use fractal_bv::{build_graph, build_spec, ApproxGraph, FractalSpec, HeatEngine};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{load_or_compute, resolve_cache_dir, CacheOutcome};
use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::experiments::{run_experiment, Context};
use crate::output::{file_names, write_file, ExperimentOutput};

pub const MANIFEST: &str = "manifest.json";

/// Command-line overrides of config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.cache_dir = resolve_cache_dir(self.cache_dir.as_deref(), cfg.cache_dir.as_deref());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub verdicts: BTreeMap<String, bool>,
    pub files: Vec<String>,
}

/// What a run did, written to `manifest.json` in the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub version: String,
    pub wall_time_secs: f64,
    pub spec: String,
    pub level: usize,
    pub vertices: usize,
    pub engine: String,
    /// `hit`, `computed`, `recomputed` or `none`.
    pub cache: String,
    pub experiments: Vec<ExperimentRecord>,
    /// Every file written, relative to the output directory.
    pub files: Vec<String>,
}

impl RunRecord {
    pub fn cache_hit(&self) -> bool {
        self.cache == "hit"
    }

    pub fn load(dir: &Path) -> Result<Self, HarnessError> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|_| HarnessError::MissingManifest(dir.display().to_string()))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }
}

/// The graph a config describes, plus the fractal it is built from.
pub fn build(cfg: &ExperimentConfig) -> Result<(FractalSpec, ApproxGraph), HarnessError> {
    let base = build_spec(&cfg.spec, cfg.carpet_params)?;
    let spec = if cfg.product { FractalSpec::product(&base, &base)? } else { base.clone() };
    let g = build_graph(&spec, cfg.level, cfg.caps.vertices)?;
    Ok((base, g))
}

/// Heat engine for `g`: dense spectra go through the cache, products reuse the
/// cached factor spectrum, large graphs use the Chebyshev engine.
pub fn heat_engine(
    g: &ApproxGraph,
    cache_dir: Option<&Path>,
    eigen_cap: usize,
) -> Result<(HeatEngine, Option<CacheOutcome>), HarnessError> {
    if let Some((a, b)) = g.factors() {
        let (sa, oa) = load_or_compute(cache_dir, a, eigen_cap)?;
        let sa = Arc::new(sa);
        let sb = if a.len() == b.len() && a.spec() == b.spec() {
            sa.clone()
        } else {
            Arc::new(load_or_compute(cache_dir, b, eigen_cap)?.0)
        };
        return Ok((HeatEngine::Product(ProductHeat::new(sa, sb)), Some(oa)));
    }
    if g.len() <= eigen_cap {
        let (sd, o) = load_or_compute(cache_dir, g, eigen_cap)?;
        return Ok((HeatEngine::Dense(Arc::new(sd)), Some(o)));
    }
    Ok((HeatEngine::for_graph(g, eigen_cap)?, None))
}

/// r- and t-grids from the config, checked against the graph, or the defaults.
fn grids(cfg: &ExperimentConfig, g: &ApproxGraph) -> Result<(Option<Vec<f64>>, Option<Vec<f64>>), HarnessError> {
    let bad = |e: fractal_bv::Error| HarnessError::Config(format!("grid does not fit level {}: {e}", cfg.level));
    let r = match &cfg.params.r_grid {
        Some(r) => {
            r.iter().try_for_each(|&x| check_r(g, x)).map_err(bad)?;
            Some(r.clone())
        }
        None => default_r_grid(g).ok(),
    };
    let mut t = match &cfg.params.t_grid {
        Some(t) => {
            t.iter().try_for_each(|&x| check_t_window(g, x)).map_err(bad)?;
            Some(t.clone())
        }
        None => default_t_grid(g).ok(),
    };
    if let (Some(d), Some(ts)) = (cfg.params.t_decades, t.as_mut()) {
        let top = ts.iter().copied().fold(0.0, f64::max);
        ts.retain(|&x| x >= top * 10f64.powf(-d) * (1.0 - 1e-12));
    }
    Ok((r, t))
}

fn engine_name(h: &HeatEngine) -> &'static str {
    match h {
        HeatEngine::Dense(_) => "dense",
        HeatEngine::Chebyshev(_) => "chebyshev",
        HeatEngine::Product(_) => "product",
    }
}

fn outcome_name(o: Option<CacheOutcome>, cached: bool) -> &'static str {
    match (o, cached) {
        (Some(CacheOutcome::Hit), _) => "hit",
        (Some(CacheOutcome::Recomputed), _) => "recomputed",
        (Some(CacheOutcome::Computed), true) => "computed",
        _ => "none",
    }
}

/// Builds the graph and heat engine, runs the experiments on a pool of
/// `jobs` threads and streams their files through one writer thread.
pub fn run(cfg: &ExperimentConfig) -> Result<RunRecord, HarnessError> {
    let start = Instant::now();
    cfg.validate()?;
    let ids = cfg.experiment_ids();
    let (base, g) = build(cfg)?;
    let (r_grid, t_grid) = grids(cfg, &g)?;
    let (heat, outcome) = heat_engine(&g, cfg.cache_dir.as_deref(), cfg.caps.eigen)?;
    let ctx = Context {
        base,
        graph: Arc::new(g),
        heat: Arc::new(heat),
        r_grid,
        t_grid,
        params: cfg.params.clone(),
        seed: cfg.seed,
        vertex_cap: cfg.caps.vertices,
        eigen_cap: cfg.caps.eigen,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;

    let dir = cfg.output_dir.clone();
    let (tx, rx) = mpsc::channel::<ExperimentOutput>();
    let writer = std::thread::spawn(move || -> Result<Vec<(String, Vec<String>)>, HarnessError> {
        let mut written = Vec::new();
        for out in rx {
            let (json, csv) = file_names(&out.experiment);
            write_file(&dir, &json, &out.to_json())?;
            write_file(&dir, &csv, &out.to_csv()?)?;
            written.push((out.experiment.clone(), vec![json, csv]));
        }
        Ok(written)
    });
    let results: Vec<Result<ExperimentOutput, HarnessError>> = pool.install(|| {
        ids.par_iter()
            .map_with(tx, |tx, id| {
                let out = run_experiment(id, &ctx).map_err(|e| HarnessError::Experiment { id: id.to_string(), source: e })?;
                // a closed channel means the writer failed; its error surfaces below
                let _ = tx.send(out.clone());
                Ok(out)
            })
            .collect()
    });
    let written = writer.join().expect("writer thread panicked")?;
    let outputs = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let files_of: BTreeMap<String, Vec<String>> = written.into_iter().collect();
    let mut files = Vec::new();
    let experiments = outputs
        .iter()
        .map(|o| {
            let f = files_of.get(&o.experiment).cloned().unwrap_or_default();
            files.extend(f.iter().cloned());
            ExperimentRecord { id: o.experiment.clone(), skipped: o.skipped.clone(), verdicts: o.verdicts.clone(), files: f }
        })
        .collect();
    files.push(MANIFEST.to_string());
    let record = RunRecord {
        config_hash: cfg.hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        spec: ctx.graph.spec().name(),
        level: ctx.graph.level(),
        vertices: ctx.graph.len(),
        engine: engine_name(&ctx.heat).to_string(),
        cache: outcome_name(outcome, cfg.cache_dir.is_some()).to_string(),
        experiments,
        files,
    };
    let mut text = serde_json::to_string_pretty(&record).expect("record serialises");
    text.push('\n');
    write_file(&cfg.output_dir, MANIFEST, &text)?;
    Ok(record)
}
