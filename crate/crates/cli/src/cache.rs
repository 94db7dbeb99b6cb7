use std::path::{Path, PathBuf};

use fractal_bv::spectral::{assemble_form, eigendecompose};
use fractal_bv::{ApproxGraph, SpectralData};
use sha2::{Digest, Sha256};

use crate::config::hex;
use crate::error::HarnessError;

/// Environment variable overriding the configured cache directory.
pub const CACHE_ENV: &str = "FRACTAL_BV_CACHE";

/// Command-line flag, then `FRACTAL_BV_CACHE`, then the config entry.
pub fn resolve_cache_dir(flag: Option<&Path>, config: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| config.map(Path::to_path_buf))
}

/// How a spectrum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    /// Computed and stored (or computed without a cache directory).
    Computed,
    /// A stored file failed its checksum and was replaced.
    Recomputed,
}

/// Cache file for a graph: name, level and a digest of its spec.
pub fn cache_path(dir: &Path, g: &ApproxGraph) -> PathBuf {
    let spec = serde_json::to_vec(g.spec()).expect("spec serialises");
    let digest = hex(&Sha256::digest(&spec));
    dir.join(format!("{}-L{}-{}.fbvspec", g.spec().name().replace(['/', ' '], "_"), g.level(), &digest[..12]))
}

/// Loads the eigendecomposition of `g` from `dir` or computes and stores it.
/// Files failing their checksum are recomputed, never reused.
pub fn load_or_compute(
    dir: Option<&Path>,
    g: &ApproxGraph,
    eigen_cap: usize,
) -> Result<(SpectralData, CacheOutcome), HarnessError> {
    let compute = || -> Result<SpectralData, HarnessError> { Ok(eigendecompose(&assemble_form(g)?, eigen_cap)?) };
    let Some(dir) = dir else {
        return Ok((compute()?, CacheOutcome::Computed));
    };
    let path = cache_path(dir, g);
    let mut outcome = CacheOutcome::Computed;
    if let Ok(bytes) = std::fs::read(&path) {
        match SpectralData::from_bytes(&bytes) {
            Ok(sd) if sd.len() == g.len() && sd.level() == g.level() && sd.spec() == g.spec() => {
                return Ok((sd, CacheOutcome::Hit));
            }
            _ => outcome = CacheOutcome::Recomputed,
        }
    }
    let sd = compute()?;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(format!("creating {}", dir.display()), e))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, sd.to_bytes()).map_err(|e| HarnessError::io(format!("writing {}", tmp.display()), e))?;
    std::fs::rename(&tmp, &path).map_err(|e| HarnessError::io(format!("renaming {}", tmp.display()), e))?;
    Ok((sd, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fractal_bv::{build_graph, FractalSpec};

    #[test]
    fn hit_after_miss_and_recompute_after_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let g = build_graph(&FractalSpec::gasket(), 2, 1000).unwrap();
        let (a, o1) = load_or_compute(Some(dir.path()), &g, 1000).unwrap();
        assert_eq!(o1, CacheOutcome::Computed);
        let (b, o2) = load_or_compute(Some(dir.path()), &g, 1000).unwrap();
        assert_eq!(o2, CacheOutcome::Hit);
        assert_eq!(a.eigenvalues(), b.eigenvalues());

        let path = cache_path(dir.path(), &g);
        let mut bytes = std::fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        std::fs::write(&path, bytes).unwrap();
        let (c, o3) = load_or_compute(Some(dir.path()), &g, 1000).unwrap();
        assert_eq!(o3, CacheOutcome::Recomputed);
        assert_eq!(a.eigenvalues(), c.eigenvalues());
        assert_eq!(load_or_compute(Some(dir.path()), &g, 1000).unwrap().1, CacheOutcome::Hit);
    }

    #[test]
    fn flag_beats_config() {
        let got = resolve_cache_dir(Some(Path::new("flag")), Some(Path::new("cfg")));
        assert_eq!(got, Some(PathBuf::from("flag")));
    }
}
