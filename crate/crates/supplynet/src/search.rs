//! Search clients: a fixture client backed by the manifest and a remote
//! web-search client.

use std::time::Duration;

use serde::Deserialize;
use supplynet_core::pipeline::{SearchHit, SearchQuery};
use thiserror::Error;

use crate::manifest::FixtureManifest;

pub const DEFAULT_MAX_RESULTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    /// Retryable; the company is marked failed and retried on the next run.
    #[error("search client unavailable: {0}")]
    Unavailable(String),
    /// Terminal for the whole run.
    #[error("search quota exceeded")]
    QuotaExceeded,
}

pub trait SearchClient: Send + Sync {
    fn search(&self, query: &SearchQuery, max_results: usize) -> Result<Vec<SearchHit>, SearchError>;
}

pub struct FixtureSearch {
    manifest: FixtureManifest,
}

impl FixtureSearch {
    pub fn new(manifest: FixtureManifest) -> Self {
        FixtureSearch { manifest }
    }
}

impl SearchClient for FixtureSearch {
    fn search(&self, query: &SearchQuery, max_results: usize) -> Result<Vec<SearchHit>, SearchError> {
        Ok(self
            .manifest
            .for_company(query.company.as_str())
            .iter()
            .take(max_results)
            .map(|e| SearchHit {
                query: query.clone(),
                url: e.url.clone(),
                title: e.title.clone(),
            })
            .collect())
    }
}

pub const BRAVE_ENDPOINT: &str = "https://api.search.brave.com/res/v1/web/search";

/// Client for a Brave-style web search API (`X-Subscription-Token` header,
/// `web.results[].url` response).
pub struct RemoteSearch {
    endpoint: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
struct RemoteResponse {
    #[serde(default)]
    web: Option<RemoteWeb>,
}

#[derive(Deserialize)]
struct RemoteWeb {
    #[serde(default)]
    results: Vec<RemoteResult>,
}

#[derive(Deserialize)]
struct RemoteResult {
    url: String,
    #[serde(default)]
    title: Option<String>,
}

impl RemoteSearch {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .build()
            .into();
        RemoteSearch {
            endpoint: endpoint.into(),
            api_key: api_key.filter(|k| !k.is_empty()),
            agent,
        }
    }

    /// Reads the key from `SEARCH_API_KEY`.
    pub fn from_env() -> Self {
        Self::new(BRAVE_ENDPOINT, std::env::var("SEARCH_API_KEY").ok())
    }

    pub fn has_credentials(&self) -> bool {
        self.api_key.is_some()
    }
}

fn parse_remote(body: &str, query: &SearchQuery, max_results: usize) -> Result<Vec<SearchHit>, SearchError> {
    let parsed: RemoteResponse =
        serde_json::from_str(body).map_err(|e| SearchError::Unavailable(format!("bad search response: {e}")))?;
    Ok(parsed
        .web
        .map(|w| w.results)
        .unwrap_or_default()
        .into_iter()
        .take(max_results)
        .map(|r| SearchHit {
            query: query.clone(),
            url: r.url,
            title: r.title,
        })
        .collect())
}

impl SearchClient for RemoteSearch {
    fn search(&self, query: &SearchQuery, max_results: usize) -> Result<Vec<SearchHit>, SearchError> {
        let key = self
            .api_key
            .as_deref()
            .ok_or_else(|| SearchError::Unavailable("SEARCH_API_KEY is not set".into()))?;
        let response = self
            .agent
            .get(&self.endpoint)
            .query("q", &query.text)
            .query("count", max_results.to_string())
            .header("Accept", "application/json")
            .header("X-Subscription-Token", key)
            .call();
        match response {
            Ok(mut r) => {
                let body = r
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| SearchError::Unavailable(e.to_string()))?;
                parse_remote(&body, query, max_results)
            }
            Err(ureq::Error::StatusCode(429)) => Err(SearchError::QuotaExceeded),
            Err(e) => Err(SearchError::Unavailable(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use supplynet_core::CompanyId;

    fn query(company: &str) -> SearchQuery {
        SearchQuery {
            company: CompanyId::new(company).unwrap(),
            text: "\"X\" suppliers".into(),
            rank: 0,
        }
    }

    #[test]
    fn fixture_search_passes_manifest_through() {
        let m = FixtureManifest::parse(
            r#"{"apple":[{"url":"https://a/1","local_path":"1"},{"url":"https://a/2","local_path":"2"}]}"#,
            ".",
        )
        .unwrap();
        let s = FixtureSearch::new(m);
        let hits = s.search(&query("apple"), 5).unwrap();
        assert_eq!(hits.iter().map(|h| h.url.as_str()).collect::<Vec<_>>(), ["https://a/1", "https://a/2"]);
        assert_eq!(s.search(&query("apple"), 1).unwrap().len(), 1);
        assert!(s.search(&query("pear"), 5).unwrap().is_empty());
    }

    #[test]
    fn remote_without_credentials_is_unavailable() {
        let s = RemoteSearch::new(BRAVE_ENDPOINT, None);
        assert!(matches!(s.search(&query("apple"), 5), Err(SearchError::Unavailable(_))));
    }

    #[test]
    fn remote_response_parsing() {
        let body = r#"{"web":{"results":[{"url":"https://x/1","title":"One"},{"url":"https://x/2"}]}}"#;
        let hits = parse_remote(body, &query("apple"), 1).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].title.as_deref(), Some("One"));
        assert!(parse_remote("{}", &query("apple"), 5).unwrap().is_empty());
        assert!(parse_remote("nope", &query("apple"), 5).is_err());
    }
}
