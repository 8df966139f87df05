//! Persistent polynomial-table cache: one append-only file per engine, one
//! checksummed JSON entry per line. Corrupt lines are skipped on load and the
//! entry is recomputed and appended again.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub corrupt: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache payload: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Default)]
struct State {
    loaded: HashMap<String, HashMap<String, String>>,
    stats: CacheStats,
}

/// In-memory cache, optionally backed by a directory.
pub struct Cache {
    dir: Option<PathBuf>,
    state: Mutex<State>,
}

fn checksum(key: &str, payload: &str) -> String {
    let mut h = Sha256::new();
    h.update(key.as_bytes());
    h.update([0u8]);
    h.update(payload.as_bytes());
    format!("{:x}", h.finalize())
}

fn header(engine: &str) -> String {
    format!("# orbitmatch-cache v{FORMAT_VERSION} engine={engine}")
}

impl Cache {
    pub fn memory() -> Self {
        Cache { dir: None, state: Mutex::new(State::default()) }
    }

    pub fn at(dir: impl AsRef<Path>) -> Result<Self, CacheError> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Cache { dir: Some(dir.as_ref().to_path_buf()), state: Mutex::new(State::default()) })
    }

    pub fn stats(&self) -> CacheStats {
        self.state.lock().expect("cache lock").stats
    }

    fn path(&self, engine: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{engine}.cache")))
    }

    fn load(&self, st: &mut State, engine: &str) {
        if st.loaded.contains_key(engine) {
            return;
        }
        let mut map = HashMap::new();
        if let Some(text) = self.path(engine).and_then(|p| fs::read_to_string(p).ok()) {
            for line in text.lines().skip(1) {
                let mut parts = line.splitn(3, '\t');
                match (parts.next(), parts.next(), parts.next()) {
                    (Some(sum), Some(key), Some(payload)) if checksum(key, payload) == sum => {
                        map.insert(key.to_string(), payload.to_string());
                    }
                    _ => st.stats.corrupt += 1,
                }
            }
        }
        st.loaded.insert(engine.to_string(), map);
    }

    fn append(&self, engine: &str, key: &str, payload: &str) -> Result<(), CacheError> {
        let Some(path) = self.path(engine) else { return Ok(()) };
        let fresh = !path.exists();
        let mut f = OpenOptions::new().create(true).append(true).open(&path)?;
        let mut line = String::new();
        if fresh {
            line.push_str(&header(engine));
            line.push('\n');
        }
        line.push_str(&format!("{}\t{key}\t{payload}\n", checksum(key, payload)));
        f.write_all(line.as_bytes())?;
        Ok(())
    }

    /// Returns the cached value for `(engine, key)` or computes and stores it.
    pub fn get_or_compute<T, E>(&self, engine: &str, key: &str, compute: impl FnOnce() -> Result<T, E>) -> Result<T, E>
    where
        T: Serialize + DeserializeOwned,
        E: From<CacheError>,
    {
        let full_key = format!("{key}|v{FORMAT_VERSION}");
        {
            let mut st = self.state.lock().expect("cache lock");
            self.load(&mut st, engine);
            if let Some(payload) = st.loaded[engine].get(&full_key) {
                if let Ok(v) = serde_json::from_str(payload) {
                    st.stats.hits += 1;
                    return Ok(v);
                }
                st.stats.corrupt += 1;
            }
            st.stats.misses += 1;
        }
        let v = compute()?;
        let payload = serde_json::to_string(&v).map_err(CacheError::from)?;
        let mut st = self.state.lock().expect("cache lock");
        let engine_map = st.loaded.get_mut(engine).expect("loaded above");
        if !engine_map.contains_key(&full_key) {
            engine_map.insert(full_key.clone(), payload.clone());
            self.append(engine, &full_key, &payload)?;
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compute(v: Vec<i64>) -> Result<Vec<i64>, CacheError> {
        Ok(v)
    }

    #[test]
    fn warm_cache_returns_identical_values() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::at(dir.path()).unwrap();
        let a = c.get_or_compute("t", "k", || compute(vec![1, 2])).unwrap();
        assert_eq!(c.stats().misses, 1);
        let c2 = Cache::at(dir.path()).unwrap();
        let b: Vec<i64> = c2.get_or_compute("t", "k", || compute(vec![9])).unwrap();
        assert_eq!(a, b);
        assert_eq!(c2.stats(), CacheStats { hits: 1, misses: 0, corrupt: 0 });
    }

    #[test]
    fn corrupt_entries_are_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::at(dir.path()).unwrap();
        c.get_or_compute("t", "k", || compute(vec![1, 2])).unwrap();
        let path = dir.path().join("t.cache");
        let text = fs::read_to_string(&path).unwrap().replace("[1,2]", "[1,3]");
        fs::write(&path, text).unwrap();
        let c2 = Cache::at(dir.path()).unwrap();
        let v = c2.get_or_compute("t", "k", || compute(vec![1, 2])).unwrap();
        assert_eq!(v, vec![1, 2]);
        assert_eq!(c2.stats().corrupt, 1);
        let c3 = Cache::at(dir.path()).unwrap();
        c3.get_or_compute("t", "k", || compute(vec![0])).unwrap();
        assert_eq!(c3.stats().hits, 1);
    }

    #[test]
    fn memory_cache_has_no_files() {
        let c = Cache::memory();
        c.get_or_compute("t", "k", || compute(vec![1])).unwrap();
        c.get_or_compute("t", "k", || compute(vec![1])).unwrap();
        assert_eq!(c.stats(), CacheStats { hits: 1, misses: 1, corrupt: 0 });
    }
}
