use std::path::Path;
use std::process::Command;

use fractal_bv_harness::{report, run, ExperimentConfig, HarnessError, Overrides, RunRecord, EXPERIMENTS};

fn config(spec: &str, level: usize, experiments: &[&str], out: &Path, cache: Option<&Path>) -> ExperimentConfig {
    let mut text = format!(
        "spec = \"{spec}\"\nlevel = {level}\nexperiments = [{}]\noutput_dir = {:?}\n",
        experiments.iter().map(|e| format!("\"{e}\"")).collect::<Vec<_>>().join(", "),
        out.display().to_string()
    );
    if let Some(c) = cache {
        text.push_str(&format!("cache_dir = {:?}\n", c.display().to_string()));
    }
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    cfg.validate().unwrap();
    cfg
}

#[test]
fn minimal_sanity_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("gasket", 2, &["sanity"], &dir.path().join("out"), None);
    let rec = run(&cfg).unwrap();
    assert_eq!(rec.experiments.len(), 1);
    let sanity = &rec.experiments[0];
    assert_eq!(sanity.skipped, None);
    assert!(!sanity.verdicts.is_empty());
    assert!(sanity.verdicts.values().all(|v| *v), "{:?}", sanity.verdicts);
    for f in &rec.files {
        assert!(dir.path().join("out").join(f).is_file(), "{f} missing");
    }
    assert_eq!(RunRecord::load(&dir.path().join("out")).unwrap(), rec);
}

#[test]
fn second_run_hits_the_cache_and_writes_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let a = config("vicsek", 2, &["sanity", "riesz"], &dir.path().join("a"), Some(&cache));
    let b = config("vicsek", 2, &["sanity", "riesz"], &dir.path().join("b"), Some(&cache));
    let ra = run(&a).unwrap();
    let rb = run(&b).unwrap();
    assert_eq!(ra.cache, "computed");
    assert!(rb.cache_hit());
    assert_eq!(ra.config_hash, rb.config_hash);
    for f in ra.files.iter().filter(|f| *f != "manifest.json") {
        let x = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
}

#[test]
fn corrupt_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cfg = config("gasket", 2, &["sanity"], &dir.path().join("out"), Some(&cache));
    run(&cfg).unwrap();
    for entry in std::fs::read_dir(&cache).unwrap() {
        let path = entry.unwrap().path();
        let mut bytes = std::fs::read(&path).unwrap();
        let k = bytes.len() / 3;
        bytes[k] ^= 1;
        std::fs::write(&path, bytes).unwrap();
    }
    assert_eq!(run(&cfg).unwrap().cache, "recomputed");
    assert_eq!(run(&cfg).unwrap().cache, "hit");
}

#[test]
fn empty_grid_is_rejected_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let text = format!(
        "spec = \"gasket\"\nlevel = 2\nexperiments = [\"sanity\"]\noutput_dir = {:?}\n[params]\nt_grid = []\n",
        out.display().to_string()
    );
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    let err = run(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(!out.exists());
}

#[test]
fn grid_outside_the_admissible_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut cfg = config("gasket", 4, &["locality"], &out, None);
    cfg.params.r_grid = Some(vec![0.5, 0.01]);
    assert!(matches!(run(&cfg), Err(HarnessError::Config(_))));
    assert!(!out.exists());
}

#[test]
fn size_cap_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("vicsek", 6, &["sanity"], &dir.path().join("out"), None);
    cfg.caps.vertices = 1000;
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 3);
}

#[test]
fn inapplicable_experiments_are_recorded_as_skipped() {
    let dir = tempfile::tempdir().unwrap();
    // single fractal: the Sobolev exponent regime needs d_W - kappa < d_H
    let cfg = config("gasket", 2, &["sobolev", "wbe", "exponent-scan"], &dir.path().join("out"), None);
    let rec = run(&cfg).unwrap();
    assert_eq!(rec.experiments.len(), 3);
    assert!(rec.experiments.iter().all(|e| e.skipped.is_some()), "{:?}", rec.experiments);
    let text = report::render(&dir.path().join("out")).unwrap();
    assert!(text.contains("3 experiments skipped"));
}

#[test]
fn jobs_do_not_change_output_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let ids = ["sanity", "locality", "coarea", "osc", "pseudo-poincare"];
    let mut a = config("gasket", 4, &ids, &dir.path().join("a"), None);
    let mut b = a.clone();
    b.output_dir = dir.path().join("b");
    a.jobs = 1;
    b.jobs = 3;
    let ra = run(&a).unwrap();
    run(&b).unwrap();
    for f in ra.files.iter().filter(|f| *f != "manifest.json") {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(f)).unwrap(),
            std::fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn report_aggregates_and_needs_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(report::render(dir.path()), Err(HarnessError::MissingManifest(_))));
    let cfg = config("gasket", 2, &["sanity", "riesz"], &dir.path().join("out"), None);
    run(&cfg).unwrap();
    let a = report::render(&dir.path().join("out")).unwrap();
    let b = report::render(&dir.path().join("out")).unwrap();
    assert_eq!(a, b);
    assert!(a.find("== sanity ==").unwrap() < a.find("== riesz ==").unwrap());
    assert!(a.contains("failed; 0 experiments skipped"));
}

#[test]
fn report_reads_sup_norm_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("gasket", 4, &["kernel-holder"], &dir.path().join("out"), None);
    run(&cfg).unwrap();
    let text = report::render(&dir.path().join("out")).unwrap();
    assert!(text.contains("== kernel-holder =="));
}

#[test]
fn overrides_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("gasket", 2, &["sanity"], &dir.path().join("out"), Some(Path::new("from-config")));
    Overrides { cache_dir: Some(dir.path().join("flag")), out: None, jobs: Some(2), seed: Some(9) }.apply(&mut cfg);
    assert_eq!(cfg.cache_dir.as_deref(), Some(dir.path().join("flag").as_path()));
    assert_eq!((cfg.jobs, cfg.seed), (2, 9));
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fractal-bv"))
}

#[test]
fn cli_list_and_exit_codes() {
    let out = binary().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), EXPERIMENTS.len());
    assert!(text.lines().next().unwrap().starts_with("sanity"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "spec = \"gasket\"\nlevel = 2\nexperiments = [\"sanity\"]\nunknown = 1\n").unwrap();
    let st = binary().args(["run", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let big = dir.path().join("big.json");
    std::fs::write(&big, r#"{"spec": "vicsek", "level": 7, "experiments": ["sanity"], "caps": {"vertices": 5000}}"#).unwrap();
    let st = binary().args(["build", "--config"]).arg(&big).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(st.code(), Some(3));

    let st = binary().arg("report").arg(dir.path().join("nothing")).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn cli_run_spectrum_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "spec = \"gasket\"\nlevel = 2\nexperiments = [\"sanity\"]\n").unwrap();
    let out = dir.path().join("out");
    let cache = dir.path().join("cache");
    let st = binary()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--cache-dir")
        .arg(&cache)
        .args(["--jobs", "2", "--seed", "3"])
        .status()
        .unwrap();
    assert!(st.success());
    assert!(out.join("sanity.json").is_file() && out.join("sanity.csv").is_file());
    let st = binary().args(["spectrum", "--config"]).arg(&cfg).arg("--out").arg(&out).arg("--cache-dir").arg(&cache).status().unwrap();
    assert!(st.success());
    let spectrum = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 1 + 15);
    let rep = binary().arg("report").arg(&out).output().unwrap();
    assert!(rep.status.success());
    assert!(String::from_utf8(rep.stdout).unwrap().contains("verdicts: 4 passed, 0 failed"));

    let env_cache = dir.path().join("env-cache");
    let st = binary()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .env("FRACTAL_BV_CACHE", &env_cache)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(std::fs::read_dir(&env_cache).unwrap().count() == 1);
}
