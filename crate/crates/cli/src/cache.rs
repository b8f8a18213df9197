//! On-disk spectrum cache.
//!
//! One JSON file per key, named by the SHA-256 of the key. The file stores
//! the key, the code-version tag, the serialized spectrum as a string and
//! the SHA-256 of that string. Any mismatch on read counts as a miss.

use crate::error::CliResult;
use locspec::{Spectrum, SpectrumKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Bumped whenever a numerical policy changes the computed values.
pub const VERSION_TAG: &str = concat!("locspec-", env!("CARGO_PKG_VERSION"), "/np1");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey {
    pub kind: SpectrumKind,
    /// Bit pattern of `c`, so equal inputs always share a key.
    pub c_bits: u64,
    /// Requested discretization; `None` is the solver's automatic choice.
    pub discretization: Option<usize>,
}

impl CacheKey {
    pub fn new(kind: SpectrumKind, c: f64, discretization: Option<usize>) -> Self {
        CacheKey { kind, c_bits: c.to_bits(), discretization }
    }

    fn text(&self) -> String {
        let d = self.discretization.map_or("auto".to_string(), |d| d.to_string());
        format!("{}|{:016x}|{d}|{VERSION_TAG}", self.kind.name(), self.c_bits)
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    version: String,
    checksum: String,
    payload: String,
}

/// Outcome of a lookup, reported on stderr.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// Present but unusable: bad checksum, stale version or unreadable.
    Invalid,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", sha256_hex(key.text().as_bytes())))
    }

    pub fn get(&self, key: &CacheKey) -> (Lookup, Option<Spectrum>) {
        let Ok(raw) = std::fs::read(self.path(key)) else {
            return (Lookup::Miss, None);
        };
        match decode(&raw, key) {
            Some(s) => (Lookup::Hit, Some(s)),
            None => (Lookup::Invalid, None),
        }
    }

    pub fn put(&self, key: &CacheKey, s: &Spectrum) -> CliResult<()> {
        let payload = serde_json::to_string(s).map_err(|e| crate::error::CliError::Io(e.to_string()))?;
        let entry = Entry {
            key: key.text(),
            version: VERSION_TAG.to_string(),
            checksum: sha256_hex(payload.as_bytes()),
            payload,
        };
        let bytes = serde_json::to_vec(&entry).map_err(|e| crate::error::CliError::Io(e.to_string()))?;
        std::fs::create_dir_all(&self.dir)?;
        write_atomic(&self.path(key), &bytes)
    }

    /// Cached spectrum for `key`, or `compute()` stored under it.
    ///
    /// Unconverged spectra are returned but never stored.
    pub fn get_or_compute(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> CliResult<Spectrum>,
    ) -> CliResult<(Lookup, Spectrum)> {
        let (lookup, hit) = self.get(key);
        if let Some(s) = hit {
            return Ok((lookup, s));
        }
        let s = compute()?;
        if s.converged {
            self.put(key, &s)?;
        }
        Ok((lookup, s))
    }
}

fn decode(raw: &[u8], key: &CacheKey) -> Option<Spectrum> {
    let e: Entry = serde_json::from_slice(raw).ok()?;
    if e.key != key.text() || e.version != VERSION_TAG || e.checksum != sha256_hex(e.payload.as_bytes()) {
        return None;
    }
    serde_json::from_str(&e.payload).ok()
}

/// Write-temp-then-rename in the target directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum() -> Spectrum {
        locspec::fock::fock_spectrum(locspec::fock::Domain::disk_with_area(3.0), None).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = CacheKey::new(SpectrumKind::FockDisk, 3.0, None);
        let s = spectrum();
        assert_eq!(cache.get(&key).0, Lookup::Miss);
        cache.put(&key, &s).unwrap();
        let (l, got) = cache.get(&key);
        assert_eq!(l, Lookup::Hit);
        assert_eq!(got.unwrap(), s);
    }

    #[test]
    fn tampered_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = CacheKey::new(SpectrumKind::FockDisk, 3.0, None);
        cache.put(&key, &spectrum()).unwrap();
        let path = cache.path(&key);
        let mut e: Entry = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
        e.payload = e.payload.replacen("\"c\":3.0", "\"c\":4.0", 1);
        assert!(e.payload.contains("\"c\":4.0"));
        std::fs::write(&path, serde_json::to_vec(&e).unwrap()).unwrap();
        assert_eq!(cache.get(&key).0, Lookup::Invalid);
    }

    #[test]
    fn keys_separate_inputs() {
        let cache = Cache::new("x");
        let a = CacheKey::new(SpectrumKind::Prolate, 50.0, None);
        let b = CacheKey::new(SpectrumKind::Prolate, 50.0, Some(300));
        let c = CacheKey::new(SpectrumKind::FockSquare, 50.0, None);
        assert_ne!(cache.path(&a), cache.path(&b));
        assert_ne!(cache.path(&a), cache.path(&c));
    }
}
