//! Networked backends: a genderize-style name API, an image search API and a
//! face-detection API, behind a shared cache and fixture replay layer.
//!
//! Every upstream call goes through [`WebClients::fetch`], which applies the
//! client mode:
//!
//! * `Live`: always hit the network, then append the response to the cache.
//! * `Cached`: serve from the cache, fall through to `Live` on a miss.
//! * `Replay`: serve from the cache or the fixture directory; the network is
//!   never touched and a miss is an error naming the `(backend, query)` key.

pub mod cache;
pub mod faces;
pub mod fixtures;
pub mod genderize;
pub mod images;
pub mod ratelimit;
pub mod transport;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use chrono::Utc;
use thiserror::Error;

use crate::country::CountryCode;
use crate::types::{BackendId, CoreError, Prediction};

pub use cache::{CacheStats, CachedResponse, ResponseCache};
pub use faces::{BoundingBox, FaceGender, FaceObservation};
pub use fixtures::{query_hash, FixtureStore};
pub use genderize::GenderizeResponse;
pub use ratelimit::{ConcurrencyLimit, RateLimiter, RetryPolicy};
pub use transport::{Body, HttpRequest, HttpResponse, NoNetwork, ReqwestTransport, Transport};

pub(crate) const SEARCH_SUFFIX: &str = "#search";
pub(crate) const DETECT_PREFIX: &str = "detect:";

/// Maximum thumbnails per query; face observations carry ranks 1..=5.
pub const MAX_THUMBNAILS: usize = 5;

pub const ENV_GENDERIZE_KEY: &str = "NAMEGENDER_GENDERIZE_KEY";
pub const ENV_FACE_KEY: &str = "NAMEGENDER_FACE_KEY";
pub const ENV_IMG_KEY: &str = "NAMEGENDER_IMG_KEY";

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("{backend} upstream returned HTTP {status}: {message}")]
    Upstream {
        backend: BackendId,
        status: u16,
        message: String,
    },
    #[error("{backend}: cannot decode response for {query:?}: {message}")]
    Decode {
        backend: BackendId,
        query: String,
        message: String,
    },
    #[error("replay: no cached response or fixture for ({backend}, {query:?})")]
    MissingFixture { backend: BackendId, query: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cache: {0}")]
    Cache(#[from] std::io::Error),
    #[error(transparent)]
    Contract(#[from] CoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClientMode {
    Live,
    #[default]
    Cached,
    Replay,
}

impl FromStr for ClientMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "live" => Ok(ClientMode::Live),
            "cached" => Ok(ClientMode::Cached),
            "replay" => Ok(ClientMode::Replay),
            _ => Err(format!("unknown mode {s:?} (expected live, cached or replay)")),
        }
    }
}

impl fmt::Display for ClientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClientMode::Live => "live",
            ClientMode::Cached => "cached",
            ClientMode::Replay => "replay",
        })
    }
}

/// The three distinct upstream services. Each gets its own pacing and
/// concurrency bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Upstream {
    Names = 0,
    Images = 1,
    Faces = 2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoints {
    pub genderize: String,
    pub face: String,
    pub images: String,
}

impl Default for Endpoints {
    fn default() -> Self {
        Endpoints {
            genderize: "https://api.genderize.io".to_string(),
            face: "https://api-us.faceplusplus.com/facepp/v3/detect".to_string(),
            images: "https://www.googleapis.com/customsearch/v1".to_string(),
        }
    }
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct ApiKeys {
    pub genderize: Option<String>,
    /// `key` or `key:secret`.
    pub face: Option<String>,
    pub images: Option<String>,
}

impl fmt::Debug for ApiKeys {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mask = |k: &Option<String>| k.as_ref().map(|_| "***");
        f.debug_struct("ApiKeys")
            .field("genderize", &mask(&self.genderize))
            .field("face", &mask(&self.face))
            .field("images", &mask(&self.images))
            .finish()
    }
}

impl ApiKeys {
    pub fn from_env() -> ApiKeys {
        let get = |name| std::env::var(name).ok().filter(|v: &String| !v.is_empty());
        ApiKeys {
            genderize: get(ENV_GENDERIZE_KEY),
            face: get(ENV_FACE_KEY),
            images: get(ENV_IMG_KEY),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub mode: ClientMode,
    pub endpoints: Endpoints,
    pub keys: ApiKeys,
    /// Requests per second per upstream; 0 disables pacing.
    pub rate_per_second: f64,
    pub max_in_flight: usize,
    pub retry: RetryPolicy,
    pub timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            mode: ClientMode::default(),
            endpoints: Endpoints::default(),
            keys: ApiKeys::default(),
            rate_per_second: 1.0,
            max_in_flight: 4,
            retry: RetryPolicy::default(),
            timeout: Duration::from_secs(30),
        }
    }
}

/// A retrieved thumbnail and its 1-based search rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thumbnail {
    pub rank: u8,
    pub bytes: Vec<u8>,
}

pub struct WebClients {
    config: ClientConfig,
    cache: Option<ResponseCache>,
    fixtures: Option<FixtureStore>,
    transport: Box<dyn Transport>,
    limiters: [RateLimiter; 3],
    in_flight: [ConcurrencyLimit; 3],
    network_requests: AtomicUsize,
}

impl fmt::Debug for WebClients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WebClients")
            .field("config", &self.config)
            .field("cache", &self.cache.as_ref().map(|c| c.path().to_path_buf()))
            .field("fixtures", &self.fixtures.as_ref().map(|f| f.root().to_path_buf()))
            .finish()
    }
}

impl WebClients {
    pub fn new(
        config: ClientConfig,
        cache: Option<ResponseCache>,
        fixtures: Option<FixtureStore>,
        transport: Box<dyn Transport>,
    ) -> Result<WebClients, ClientError> {
        if config.mode == ClientMode::Replay && cache.is_none() && fixtures.is_none() {
            return Err(ClientError::Config(
                "replay mode requires a cache file or a fixtures directory".into(),
            ));
        }
        let limiters = std::array::from_fn(|_| RateLimiter::new(config.rate_per_second));
        let in_flight = std::array::from_fn(|_| ConcurrencyLimit::new(config.max_in_flight));
        Ok(WebClients {
            config,
            cache,
            fixtures,
            transport,
            limiters,
            in_flight,
            network_requests: AtomicUsize::new(0),
        })
    }

    /// Real network in live and cached modes, none in replay mode.
    pub fn with_default_transport(
        config: ClientConfig,
        cache: Option<ResponseCache>,
        fixtures: Option<FixtureStore>,
    ) -> Result<WebClients, ClientError> {
        let transport: Box<dyn Transport> = match config.mode {
            ClientMode::Replay => Box::new(NoNetwork),
            _ => Box::new(ReqwestTransport::new(config.timeout).map_err(ClientError::Transport)?),
        };
        WebClients::new(config, cache, fixtures, transport)
    }

    pub fn mode(&self) -> ClientMode {
        self.config.mode
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    pub fn cache(&self) -> Option<&ResponseCache> {
        self.cache.as_ref()
    }

    /// Number of requests handed to the transport so far.
    pub fn network_requests(&self) -> usize {
        self.network_requests.load(Ordering::Relaxed)
    }

    fn recorded(&self, backend: BackendId, query: &str) -> Result<Option<HttpResponse>, ClientError> {
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(backend, query)) {
            return Ok(Some(HttpResponse {
                status: hit.status,
                body: hit.payload,
            }));
        }
        if self.config.mode == ClientMode::Replay {
            if let Some(fixtures) = &self.fixtures {
                return Ok(fixtures.get(backend, query)?);
            }
        }
        Ok(None)
    }

    fn send_live(&self, upstream: Upstream, request: &HttpRequest) -> Result<HttpResponse, ClientError> {
        let retry = self.config.retry;
        let mut attempt = 0;
        loop {
            self.limiters[upstream as usize].acquire();
            let response = {
                let _permit = self.in_flight[upstream as usize].acquire();
                self.network_requests.fetch_add(1, Ordering::Relaxed);
                self.transport.send(request).map_err(ClientError::Transport)?
            };
            if response.status == 429 && attempt < retry.max_retries {
                let delay = retry.delay(attempt);
                log::warn!("{}: HTTP 429, retrying in {delay:?}", request.url);
                std::thread::sleep(delay);
                attempt += 1;
                continue;
            }
            return Ok(response);
        }
    }

    /// Resolves one upstream call according to the client mode.
    pub fn fetch(
        &self,
        backend: BackendId,
        upstream: Upstream,
        query: &str,
        request: impl FnOnce() -> Result<HttpRequest, ClientError>,
    ) -> Result<HttpResponse, ClientError> {
        if self.config.mode != ClientMode::Live {
            if let Some(hit) = self.recorded(backend, query)? {
                return Ok(hit);
            }
        }
        if self.config.mode == ClientMode::Replay {
            return Err(ClientError::MissingFixture {
                backend,
                query: query.to_string(),
            });
        }
        let request = request()?;
        let response = self.send_live(upstream, &request)?;
        if response.status != 429 && response.status < 500 {
            if let Some(cache) = &self.cache {
                cache.put(CachedResponse {
                    backend,
                    query: query.to_string(),
                    fetched_at: Utc::now(),
                    status: response.status,
                    payload: response.body.clone(),
                })?;
            }
        }
        Ok(response)
    }

    fn require_key(&self, key: &Option<String>, env: &str) -> Result<String, ClientError> {
        key.clone()
            .ok_or_else(|| ClientError::Config(format!("API key missing (set {env})")))
    }

    /// Name API lookup. The country, when given, is forwarded as `country_id`.
    pub fn genderize_lookup(
        &self,
        first_name: &str,
        country: Option<CountryCode>,
    ) -> Result<Prediction, ClientError> {
        let first_name = first_name.trim();
        if first_name.is_empty() {
            return Err(CoreError::EmptyName.into());
        }
        let query = genderize::canonical_query(first_name, country);
        let response = self.fetch(BackendId::Genderize, Upstream::Names, &query, || {
            let mut req = HttpRequest::get(&self.config.endpoints.genderize).param("name", first_name);
            if let Some(c) = country {
                req = req.param("country_id", c.as_str());
            }
            if let Some(key) = &self.config.keys.genderize {
                req = req.param("apikey", key.as_str());
            }
            Ok(req)
        })?;
        if !response.is_success() {
            return Err(ClientError::Upstream {
                backend: BackendId::Genderize,
                status: response.status,
                message: faces::error_message(&response.body),
            });
        }
        let decode_err = |message| ClientError::Decode {
            backend: BackendId::Genderize,
            query: query.clone(),
            message,
        };
        GenderizeResponse::decode(&response.body)
            .and_then(|r| r.to_prediction())
            .map_err(decode_err)
    }

    /// Up to `k` thumbnails for an image query, in search rank order.
    ///
    /// The listing is cached under `(Face, "<query>#search")` and each
    /// thumbnail under `(Face, "<query>#<rank>")`. Thumbnails whose download
    /// fails upstream are skipped.
    pub fn fetch_thumbnails(&self, query: &str, k: usize) -> Result<Vec<Thumbnail>, ClientError> {
        if k > MAX_THUMBNAILS {
            return Err(CoreError::ContractViolation(format!(
                "at most {MAX_THUMBNAILS} thumbnails per query, asked for {k}"
            ))
            .into());
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        if query.trim().is_empty() {
            return Err(CoreError::EmptyName.into());
        }
        let listing_key = format!("{query}{SEARCH_SUFFIX}");
        let listing = self.fetch(BackendId::Face, Upstream::Images, &listing_key, || {
            let key = self.require_key(&self.config.keys.images, ENV_IMG_KEY)?;
            Ok(HttpRequest::get(&self.config.endpoints.images)
                .param("q", query)
                .param("searchType", "image")
                .param("num", k.to_string())
                .param("key", key))
        })?;
        if !listing.is_success() {
            return Err(ClientError::Upstream {
                backend: BackendId::Face,
                status: listing.status,
                message: faces::error_message(&listing.body),
            });
        }
        let urls = images::decode_listing(&listing.body).map_err(|message| ClientError::Decode {
            backend: BackendId::Face,
            query: listing_key.clone(),
            message,
        })?;

        let mut out = Vec::new();
        for (i, url) in urls.into_iter().take(k).enumerate() {
            let rank = (i + 1) as u8;
            let thumb_key = format!("{query}#{rank}");
            let response = self.fetch(BackendId::Face, Upstream::Images, &thumb_key, || {
                Ok(HttpRequest::get(url.clone()))
            })?;
            if response.is_success() && !response.body.is_empty() {
                out.push(Thumbnail {
                    rank,
                    bytes: response.body,
                });
            } else {
                log::warn!("{thumb_key}: thumbnail unavailable (HTTP {})", response.status);
            }
        }
        Ok(out)
    }

    /// Face detection on one image. Cached under `(Face, "detect:<sha256>")`.
    pub fn detect_faces(&self, image: &[u8], image_rank: u8) -> Result<Vec<FaceObservation>, ClientError> {
        if image.is_empty() {
            return Err(CoreError::ContractViolation("empty image payload".into()).into());
        }
        let query = format!("{DETECT_PREFIX}{}", fixtures::sha256_hex(image));
        let response = self.fetch(BackendId::Face, Upstream::Faces, &query, || {
            let key = self.require_key(&self.config.keys.face, ENV_FACE_KEY)?;
            let (api_key, api_secret) = match key.split_once(':') {
                Some((k, s)) => (k.to_string(), Some(s.to_string())),
                None => (key, None),
            };
            let mut fields = vec![
                ("api_key".to_string(), api_key),
                ("return_attributes".to_string(), "gender".to_string()),
            ];
            if let Some(secret) = api_secret {
                fields.push(("api_secret".to_string(), secret));
            }
            Ok(HttpRequest::post(
                &self.config.endpoints.face,
                Body::Multipart {
                    fields,
                    file_field: "image_file".to_string(),
                    file_name: format!("{image_rank}.jpg"),
                    file: image.to_vec(),
                },
            ))
        })?;
        if !response.is_success() {
            return Err(ClientError::Upstream {
                backend: BackendId::Face,
                status: response.status,
                message: faces::error_message(&response.body),
            });
        }
        faces::decode_faces(&response.body, image_rank).map_err(|message| ClientError::Decode {
            backend: BackendId::Face,
            query,
            message,
        })
    }
}
