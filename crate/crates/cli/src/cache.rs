//! Content-addressed disk cache for expensive intermediates.
//!
//! Keys are SHA-256 digests of a canonical JSON job description (sorted keys)
//! plus the payload schema version. Payloads are CBOR, written to a temporary
//! file in the cache directory and renamed into place.

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Bumped whenever a cached type changes shape.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "MULAB_CACHE";
pub const DEFAULT_CACHE_DIR: &str = ".mulab-cache";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: String,
    pub params: Value,
    pub version: String,
}

impl JobSpec {
    pub fn new(command: &str, params: Value) -> Self {
        JobSpec { command: command.into(), params, version: format!("{}+schema{}", env!("CARGO_PKG_VERSION"), SCHEMA_VERSION) }
    }

    /// serde_json maps are ordered, so this serialization is canonical.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("job spec serializes")
    }

    pub fn key(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema: u32,
    spec: String,
    created_unix: u64,
    payload: T,
}

pub struct Cache {
    dir: Option<PathBuf>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl Cache {
    /// Directory from MULAB_CACHE, else `.mulab-cache`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        Cache::at(dir)
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: Some(dir.into()), hits: AtomicUsize::new(0), misses: AtomicUsize::new(0) }
    }

    pub fn disabled() -> Self {
        Cache { dir: None, hits: AtomicUsize::new(0), misses: AtomicUsize::new(0) }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    fn path_for(&self, spec: &JobSpec) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.cbor", spec.key())))
    }

    fn load<T: DeserializeOwned>(&self, path: &Path, spec: &JobSpec) -> Option<T> {
        let file = std::fs::File::open(path).ok()?;
        match ciborium::from_reader::<Envelope<T>, _>(std::io::BufReader::new(file)) {
            Ok(env) if env.schema == SCHEMA_VERSION && env.spec == spec.canonical() => Some(env.payload),
            Ok(_) => {
                log::warn!("cache entry {} has a different schema or spec; recomputing", path.display());
                None
            }
            Err(err) => {
                log::warn!("corrupt cache entry {}: {err}; recomputing", path.display());
                None
            }
        }
    }

    fn store<T: Serialize>(&self, path: &Path, spec: &JobSpec, payload: &T) -> Result<()> {
        let dir = path.parent().expect("cache path has a parent");
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let env = Envelope { schema: SCHEMA_VERSION, spec: spec.canonical(), created_unix, payload };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        ciborium::into_writer(&env, &mut tmp).context("encoding cache payload")?;
        tmp.flush()?;
        // rename is atomic; a concurrent writer of the same key leaves identical bytes
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Cached value for `spec`, computing and storing it on a miss.
    pub fn get_or_compute<T, F>(&self, spec: &JobSpec, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let Some(path) = self.path_for(spec) else {
            return compute();
        };
        if let Some(v) = self.load(&path, spec) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            log::debug!("cache hit {} ({})", spec.command, path.display());
            return Ok(v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        log::debug!("cache miss {}", spec.command);
        let v = compute()?;
        if let Err(err) = self.store(&path, spec, &v) {
            log::warn!("could not store cache entry: {err}");
        }
        Ok(v)
    }
}
