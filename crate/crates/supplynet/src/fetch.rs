//! Document fetchers. Both enforce the size cap and content-type detection;
//! the HTTP fetcher also waits between requests to the same host.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use supplynet_core::pipeline::{RawDocument, SearchHit};
use supplynet_core::text::detect_content_type;
use supplynet_core::{ContentType, Timestamp};
use thiserror::Error;

use crate::clock::Clock;
use crate::manifest::FixtureManifest;

pub const DEFAULT_SIZE_CAP: u64 = 20 * 1024 * 1024;
pub const DEFAULT_POLITENESS: Duration = Duration::from_secs(1);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FetchError {
    #[error("network error: {0}")]
    Network(String),
    #[error("unsupported content type for {0}")]
    UnsupportedContentType(String),
    #[error("payload exceeds the {limit}-byte size cap")]
    SizeCapExceeded { limit: u64 },
    #[error("empty payload")]
    Empty,
}

pub trait Fetcher: Send + Sync {
    fn fetch(&self, hit: &SearchHit) -> Result<RawDocument, FetchError>;
}

fn finish(
    url: &str,
    header: Option<&str>,
    declared: Option<ContentType>,
    bytes: Vec<u8>,
    fetched_at: Timestamp,
) -> Result<RawDocument, FetchError> {
    if bytes.is_empty() {
        return Err(FetchError::Empty);
    }
    let content_type = declared
        .or_else(|| detect_content_type(header, url, &bytes))
        .ok_or_else(|| FetchError::UnsupportedContentType(url.to_string()))?;
    Ok(RawDocument {
        url: url.to_string(),
        bytes,
        content_type,
        fetched_at,
    })
}

/// Reads manifest documents from disk.
pub struct FixtureFetcher {
    manifest: FixtureManifest,
    size_cap: u64,
}

impl FixtureFetcher {
    pub fn new(manifest: FixtureManifest) -> Self {
        FixtureFetcher {
            manifest,
            size_cap: DEFAULT_SIZE_CAP,
        }
    }

    pub fn with_size_cap(mut self, size_cap: u64) -> Self {
        self.size_cap = size_cap;
        self
    }
}

impl Fetcher for FixtureFetcher {
    fn fetch(&self, hit: &SearchHit) -> Result<RawDocument, FetchError> {
        let entry = self
            .manifest
            .by_url(&hit.url)
            .ok_or_else(|| FetchError::Network(format!("{} is not in the fixture manifest", hit.url)))?;
        let path = self.manifest.resolve(entry);
        let len = std::fs::metadata(&path)
            .map_err(|e| FetchError::Network(format!("{}: {e}", path.display())))?
            .len();
        if len > self.size_cap {
            return Err(FetchError::SizeCapExceeded { limit: self.size_cap });
        }
        let bytes = std::fs::read(&path).map_err(|e| FetchError::Network(format!("{}: {e}", path.display())))?;
        finish(&hit.url, None, entry.content_type, bytes, entry.retrieved_at())
    }
}

/// Fetches over HTTP(S) with a per-host politeness delay.
pub struct HttpFetcher<C: Clock> {
    agent: ureq::Agent,
    clock: C,
    size_cap: u64,
    delay: Duration,
    last_request: Mutex<HashMap<String, Instant>>,
}

impl<C: Clock> HttpFetcher<C> {
    pub fn new(clock: C) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .user_agent(concat!("supplynet/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        HttpFetcher {
            agent,
            clock,
            size_cap: DEFAULT_SIZE_CAP,
            delay: DEFAULT_POLITENESS,
            last_request: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_size_cap(mut self, size_cap: u64) -> Self {
        self.size_cap = size_cap;
        self
    }

    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    fn wait_for_host(&self, host: &str) {
        let wait = {
            let mut last = self.last_request.lock().expect("politeness table poisoned");
            let now = Instant::now();
            let ready_at = last.get(host).map(|t| *t + self.delay).unwrap_or(now);
            let start = ready_at.max(now);
            last.insert(host.to_string(), start);
            start - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

impl<C: Clock> Fetcher for HttpFetcher<C> {
    fn fetch(&self, hit: &SearchHit) -> Result<RawDocument, FetchError> {
        let parsed = url::Url::parse(&hit.url).map_err(|e| FetchError::Network(format!("{}: {e}", hit.url)))?;
        if !matches!(parsed.scheme(), "http" | "https") {
            return Err(FetchError::Network(format!("unsupported scheme in {}", hit.url)));
        }
        self.wait_for_host(parsed.host_str().unwrap_or_default());
        let mut response = self
            .agent
            .get(hit.url.as_str())
            .call()
            .map_err(|e| FetchError::Network(e.to_string()))?;
        let header = response
            .headers()
            .get("content-type")
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        let bytes = response
            .body_mut()
            .with_config()
            .limit(self.size_cap)
            .read_to_vec()
            .map_err(|e| match e {
                ureq::Error::BodyExceedsLimit(_) => FetchError::SizeCapExceeded { limit: self.size_cap },
                other => FetchError::Network(other.to_string()),
            })?;
        finish(&hit.url, header.as_deref(), None, bytes, self.clock.now())
    }
}
