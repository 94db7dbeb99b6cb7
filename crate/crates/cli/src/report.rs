use std::fmt::Write as _;
use std::path::Path;

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::HarnessError;
use crate::run::RunRecord;

// Non-finite floats are written as JSON null, so only the fields shown here are
// read back, with nulls allowed.
#[derive(Deserialize)]
struct OutputView {
    params: BTreeMap<String, serde_json::Value>,
    summaries: BTreeMap<String, Option<f64>>,
}

/// Plain-text summary of a run directory: one table per experiment with its
/// parameters, summary values and verdicts, then the pass/fail totals.
pub fn render(dir: &Path) -> Result<String, HarnessError> {
    let record = RunRecord::load(dir)?;
    let mut s = String::new();
    let _ = writeln!(s, "run: {} level {} ({} vertices, {} engine)", record.spec, record.level, record.vertices, record.engine);
    let _ = writeln!(s, "config {} | version {} | cache {}", &record.config_hash[..16], record.version, record.cache);
    let (mut pass, mut fail, mut skipped) = (0, 0, 0);
    for exp in &record.experiments {
        let _ = writeln!(s, "\n== {} ==", exp.id);
        if let Some(reason) = &exp.skipped {
            skipped += 1;
            let _ = writeln!(s, "  skipped: {reason}");
            continue;
        }
        let json = exp.files.iter().find(|f| f.ends_with(".json"));
        if let Some(name) = json {
            let path = dir.join(name);
            let text =
                std::fs::read_to_string(&path).map_err(|e| HarnessError::io(format!("reading {}", path.display()), e))?;
            let out: OutputView = serde_json::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            for (k, v) in &out.params {
                let _ = writeln!(s, "  param   {k:<40} {v}");
            }
            for (k, v) in &out.summaries {
                match v {
                    Some(v) => writeln!(s, "  summary {k:<40} {v:.6e}"),
                    None => writeln!(s, "  summary {k:<40} non-finite"),
                }
                .ok();
            }
        }
        for (k, v) in &exp.verdicts {
            let _ = writeln!(s, "  verdict {k:<40} {}", if *v { "PASS" } else { "FAIL" });
            if *v {
                pass += 1;
            } else {
                fail += 1;
            }
        }
        for f in exp.files.iter().filter(|f| f.ends_with(".csv")) {
            let _ = writeln!(s, "  csv     {}", dir.join(f).display());
        }
    }
    let _ = writeln!(s, "\nverdicts: {pass} passed, {fail} failed; {skipped} experiments skipped");
    Ok(s)
}
