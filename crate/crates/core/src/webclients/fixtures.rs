//! Read-only fixture directory used in replay mode.
//!
//! Layout:
//!
//! ```text
//! fixtures/
//!   genderize.json          {"<canonical query>": <name API response body>, ...}
//!   <query-hash>/1.jpg      thumbnails for one image query, by rank
//!   <query-hash>/1.json     face API response for 1.jpg (status 200)
//!   <query-hash>/2.400.json face API response for 2.jpg with status 400
//! ```
//!
//! `<query-hash>` is [`query_hash`] of the whitespace-collapsed image query.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::transport::HttpResponse;
use super::{SEARCH_SUFFIX, DETECT_PREFIX};
use crate::types::BackendId;

/// First 16 hex digits of the SHA-256 of the query.
pub fn query_hash(query: &str) -> String {
    let digest = Sha256::digest(query.as_bytes());
    hex::encode(&digest[..8])
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

const IMAGE_EXTENSIONS: [&str; 4] = ["jpg", "jpeg", "png", "gif"];

#[derive(Debug, Default)]
pub struct FixtureStore {
    root: PathBuf,
    genderize: HashMap<String, Vec<u8>>,
    /// query hash -> rank -> thumbnail path
    thumbnails: HashMap<String, BTreeMap<u32, PathBuf>>,
    /// sha256 of image bytes -> (status, path of the face response)
    detections: HashMap<String, (u16, PathBuf)>,
}

fn parse_face_response_name(stem: &str) -> Option<(u32, u16)> {
    // "3" or "3.400"
    let mut parts = stem.splitn(2, '.');
    let rank = parts.next()?.parse().ok()?;
    let status = match parts.next() {
        Some(s) => s.parse().ok()?,
        None => 200,
    };
    Some((rank, status))
}

impl FixtureStore {
    pub fn open(root: impl Into<PathBuf>) -> std::io::Result<FixtureStore> {
        let root = root.into();
        let mut store = FixtureStore {
            root: root.clone(),
            ..FixtureStore::default()
        };

        let genderize_path = root.join("genderize.json");
        if genderize_path.exists() {
            let text = fs::read_to_string(&genderize_path)?;
            let map: BTreeMap<String, serde_json::Value> = serde_json::from_str(&text)
                .map_err(|e| {
                    std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("{}: {e}", genderize_path.display()),
                    )
                })?;
            for (query, body) in map {
                store
                    .genderize
                    .insert(query, serde_json::to_vec(&body).expect("json value serializes"));
            }
        }

        let mut dirs: Vec<PathBuf> = fs::read_dir(&root)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        dirs.sort();
        for dir in dirs {
            let hash = dir.file_name().unwrap().to_string_lossy().into_owned();
            let mut thumbs = BTreeMap::new();
            let mut responses: HashMap<u32, (u16, PathBuf)> = HashMap::new();
            for entry in fs::read_dir(&dir)?.filter_map(|e| e.ok()) {
                let path = entry.path();
                let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                    continue;
                };
                let Some((stem, ext)) = name.rsplit_once('.') else {
                    continue;
                };
                if IMAGE_EXTENSIONS.contains(&ext.to_ascii_lowercase().as_str()) {
                    if let Ok(rank) = stem.parse::<u32>() {
                        thumbs.insert(rank, path);
                    }
                } else if ext == "json" {
                    if let Some((rank, status)) = parse_face_response_name(stem) {
                        responses.insert(rank, (status, path));
                    }
                }
            }
            for (rank, image_path) in &thumbs {
                if let Some(response) = responses.remove(rank) {
                    let bytes = fs::read(image_path)?;
                    store.detections.insert(sha256_hex(&bytes), response);
                }
            }
            store.thumbnails.insert(hash, thumbs);
        }
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Response recorded for `(backend, query)`, in the same shape the live
    /// upstream would have produced.
    pub fn get(&self, backend: BackendId, query: &str) -> std::io::Result<Option<HttpResponse>> {
        let ok = |body: Vec<u8>| Some(HttpResponse { status: 200, body });
        match backend {
            BackendId::Genderize => Ok(self.genderize.get(query).cloned().and_then(ok)),
            BackendId::Face => {
                if let Some(digest) = query.strip_prefix(DETECT_PREFIX) {
                    return match self.detections.get(digest) {
                        Some((status, path)) => Ok(Some(HttpResponse {
                            status: *status,
                            body: fs::read(path)?,
                        })),
                        None => Ok(None),
                    };
                }
                if let Some(q) = query.strip_suffix(SEARCH_SUFFIX) {
                    let hash = query_hash(q);
                    return Ok(self.thumbnails.get(&hash).map(|thumbs| {
                        let items: Vec<serde_json::Value> = thumbs
                            .keys()
                            .map(|rank| {
                                let link = format!("fixture://{hash}/{rank}");
                                serde_json::json!({"link": link, "image": {"thumbnailLink": link}})
                            })
                            .collect();
                        HttpResponse {
                            status: 200,
                            body: serde_json::to_vec(&serde_json::json!({ "items": items }))
                                .expect("listing serializes"),
                        }
                    }));
                }
                if let Some((q, rank)) = query.rsplit_once('#') {
                    let Ok(rank) = rank.parse::<u32>() else {
                        return Ok(None);
                    };
                    if let Some(path) = self
                        .thumbnails
                        .get(&query_hash(q))
                        .and_then(|t| t.get(&rank))
                    {
                        return Ok(ok(fs::read(path)?));
                    }
                }
                Ok(None)
            }
            _ => Ok(None),
        }
    }
}
