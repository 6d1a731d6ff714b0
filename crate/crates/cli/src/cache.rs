//! On-disk cache for band computations.
//!
//! Keys hash the command name, the numeric parameters at 12 significant
//! digits, and the crate version. Unreadable or inconsistent entries are
//! reported and recomputed; about 1% of hits are recomputed anyway and
//! compared.

use std::fs;
use std::path::{Path, PathBuf};

use amo_core::spectrum::{band_edges, BandList};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

/// `x` rounded to 12 significant digits, as text.
pub fn canonical(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.11e}")
    }
}

pub fn cache_key(command: &str, params: &[(&str, f64)]) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    for (name, v) in params {
        h.update(format!("\n{name}={}", canonical(*v)).as_bytes());
    }
    h.update(format!("\nversion={VERSION}").as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Deterministic 1% sample of keys.
fn spot_checked(key: &str) -> bool {
    u16::from_str_radix(&key[..4], 16).is_ok_and(|v| v % 100 == 0)
}

impl Cache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn load(&self, path: &Path, lambda: f64, p: u64, q: u64) -> CliResult<Option<BandList>> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = || CliError::CacheCorrupt(path.display().to_string());
        let b: BandList = serde_json::from_str(&text).map_err(|_| corrupt())?;
        let shape_ok = b.bands.len() as u64 == q
            && b.bands.iter().all(|x| x.lo.is_finite() && x.hi.is_finite() && x.lo <= x.hi)
            && b.bands.windows(2).all(|w| w[0].lo <= w[1].lo);
        if b.p != p || b.q != q || canonical(b.lambda) != canonical(lambda) || !shape_ok {
            return Err(corrupt());
        }
        Ok(Some(b))
    }

    fn store(&self, path: &Path, b: &BandList) -> CliResult<()> {
        let dir = path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_string(b).map_err(|e| CliError::CacheCorrupt(e.to_string()))?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Bands of `Σ_{λ,p/q}`, from the cache when possible.
    pub fn bands(&self, lambda: f64, p: u64, q: u64) -> CliResult<BandList> {
        let Some(dir) = &self.dir else {
            return Ok(band_edges(lambda, p, q)?);
        };
        let key = cache_key("bands", &[("lambda", lambda), ("p", p as f64), ("q", q as f64)]);
        let path = dir.join(format!("{key}.json"));
        match self.load(&path, lambda, p, q) {
            Ok(Some(hit)) if !spot_checked(&key) => return Ok(hit),
            Ok(Some(hit)) => {
                let fresh = band_edges(lambda, p, q)?;
                if fresh == hit {
                    return Ok(hit);
                }
                eprintln!("warning: cache entry {} disagrees with recomputation; replaced", path.display());
                self.store(&path, &fresh)?;
                return Ok(fresh);
            }
            Ok(None) => {}
            Err(e @ CliError::CacheCorrupt(_)) => eprintln!("warning: {e}; recomputing"),
            Err(e) => eprintln!("warning: cache read failed ({e}); recomputing"),
        }
        let fresh = band_edges(lambda, p, q)?;
        if let Err(e) = self.store(&path, &fresh) {
            eprintln!("warning: cache write failed ({e})");
        }
        Ok(fresh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("amo-cache-test-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn keys_ignore_noise_below_twelve_digits() {
        let a = cache_key("bands", &[("lambda", 0.5)]);
        assert_eq!(a, cache_key("bands", &[("lambda", 0.5 + 1e-15)]));
        assert_ne!(a, cache_key("bands", &[("lambda", 0.5 + 1e-9)]));
        assert_ne!(a, cache_key("gaps", &[("lambda", 0.5)]));
    }

    #[test]
    fn hit_equals_recomputation() {
        let d = tmp("hit");
        let c = Cache::at(&d);
        let first = c.bands(0.7, 2, 5).unwrap();
        let second = c.bands(0.7, 2, 5).unwrap();
        assert_eq!(first, second);
        assert_eq!(second, band_edges(0.7, 2, 5).unwrap());
        assert_eq!(fs::read_dir(&d).unwrap().count(), 1);
        fs::remove_dir_all(d).unwrap();
    }

    #[test]
    fn corrupt_entry_is_recomputed() {
        let d = tmp("corrupt");
        let c = Cache::at(&d);
        c.bands(1.0, 1, 3).unwrap();
        let entry = fs::read_dir(&d).unwrap().next().unwrap().unwrap().path();
        fs::write(&entry, "{not json").unwrap();
        assert_eq!(c.bands(1.0, 1, 3).unwrap(), band_edges(1.0, 1, 3).unwrap());
        let healed: BandList = serde_json::from_str(&fs::read_to_string(&entry).unwrap()).unwrap();
        assert_eq!(healed.q, 3);
        fs::remove_dir_all(d).unwrap();
    }
}
