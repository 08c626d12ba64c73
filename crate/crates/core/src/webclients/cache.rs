//! Append-only JSON-lines response cache.
//!
//! Each line is one [`CachedResponse`] with the payload base64-encoded, so
//! arbitrary bytes (thumbnails included) survive the round trip. The most
//! recent record for a `(backend, query)` key wins. Reads go through an
//! in-memory index loaded at open time; appends are serialized by one writer.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::types::BackendId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedResponse {
    pub backend: BackendId,
    pub query: String,
    pub fetched_at: DateTime<Utc>,
    pub status: u16,
    pub payload: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    backend: BackendId,
    query: String,
    fetched_at: String,
    status: u16,
    payload_b64: String,
}

impl CachedResponse {
    fn to_line(&self) -> String {
        let line = CacheLine {
            backend: self.backend,
            query: self.query.clone(),
            fetched_at: self.fetched_at.to_rfc3339_opts(SecondsFormat::Millis, true),
            status: self.status,
            payload_b64: B64.encode(&self.payload),
        };
        serde_json::to_string(&line).expect("cache line serializes")
    }

    fn from_line(line: &str) -> Result<CachedResponse, String> {
        let raw: CacheLine = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let fetched_at = DateTime::parse_from_rfc3339(&raw.fetched_at)
            .map_err(|e| format!("fetched_at: {e}"))?
            .with_timezone(&Utc);
        let payload = B64
            .decode(raw.payload_b64.as_bytes())
            .map_err(|e| format!("payload_b64: {e}"))?;
        Ok(CachedResponse {
            backend: raw.backend,
            query: raw.query,
            fetched_at,
            status: raw.status,
            payload,
        })
    }
}

type Key = (BackendId, String);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub per_backend: BTreeMap<BackendId, usize>,
    pub records: usize,
    pub superseded: usize,
    pub corrupt: usize,
}

#[derive(Debug)]
pub struct ResponseCache {
    path: PathBuf,
    index: RwLock<HashMap<Key, CachedResponse>>,
    writer: Mutex<()>,
}

/// Reads every valid record in file order. Corrupt lines are counted and skipped.
fn read_records(path: &Path) -> std::io::Result<(Vec<CachedResponse>, usize)> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((Vec::new(), 0)),
        Err(e) => return Err(e),
    };
    let mut records = Vec::new();
    let mut corrupt = 0;
    for (i, line) in BufReader::new(file).split(b'\n').enumerate() {
        let line = line?;
        let text = String::from_utf8_lossy(&line);
        if text.trim().is_empty() {
            continue;
        }
        match CachedResponse::from_line(text.trim()) {
            Ok(r) => records.push(r),
            Err(e) => {
                corrupt += 1;
                log::warn!("{}:{}: skipping corrupt cache line: {e}", path.display(), i + 1);
            }
        }
    }
    Ok((records, corrupt))
}

impl ResponseCache {
    /// Opens (without creating) the cache file and loads its index.
    pub fn open(path: impl Into<PathBuf>) -> std::io::Result<ResponseCache> {
        let path = path.into();
        let (records, _) = read_records(&path)?;
        let mut index = HashMap::new();
        for r in records {
            index.insert((r.backend, r.query.clone()), r);
        }
        Ok(ResponseCache {
            path,
            index: RwLock::new(index),
            writer: Mutex::new(()),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, backend: BackendId, query: &str) -> Option<CachedResponse> {
        self.index
            .read()
            .expect("cache index poisoned")
            .get(&(backend, query.to_string()))
            .cloned()
    }

    pub fn put(&self, response: CachedResponse) -> std::io::Result<()> {
        let _guard = self.writer.lock().expect("cache writer poisoned");
        if let Some(parent) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        writeln!(file, "{}", response.to_line())?;
        file.flush()?;
        self.index
            .write()
            .expect("cache index poisoned")
            .insert((response.backend, response.query.clone()), response);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.index.read().expect("cache index poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Counts distinct keys per backend, plus superseded and corrupt lines on disk.
    pub fn stats(&self) -> std::io::Result<CacheStats> {
        let (records, corrupt) = read_records(&self.path)?;
        let mut latest: HashMap<Key, ()> = HashMap::new();
        for r in &records {
            latest.insert((r.backend, r.query.clone()), ());
        }
        let mut per_backend: BTreeMap<BackendId, usize> =
            BackendId::ALL.iter().map(|&b| (b, 0)).collect();
        for (backend, _) in latest.keys() {
            *per_backend.entry(*backend).or_default() += 1;
        }
        Ok(CacheStats {
            per_backend,
            records: records.len(),
            superseded: records.len() - latest.len(),
            corrupt,
        })
    }

    /// Rewrites the file keeping only the latest record per key, in the order
    /// those records were appended. Returns the number of lines dropped.
    pub fn prune(&self) -> std::io::Result<usize> {
        let _guard = self.writer.lock().expect("cache writer poisoned");
        let (records, corrupt) = read_records(&self.path)?;
        let mut last_pos: HashMap<Key, usize> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            last_pos.insert((r.backend, r.query.clone()), i);
        }
        let kept: Vec<&CachedResponse> = records
            .iter()
            .enumerate()
            .filter(|(i, r)| last_pos[&(r.backend, r.query.clone())] == *i)
            .map(|(_, r)| r)
            .collect();
        let dropped = records.len() - kept.len() + corrupt;

        let tmp = self.path.with_extension("prune.tmp");
        {
            let mut out = File::create(&tmp)?;
            for r in &kept {
                writeln!(out, "{}", r.to_line())?;
            }
            out.flush()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(dropped)
    }
}
