//! Fixture manifest: a JSON map from company id to the documents a search
//! for that company should return.
//!
//! ```json
//! { "apple": [ { "url": "https://apple.example/suppliers.txt",
//!                "local_path": "docs/apple.txt",
//!                "content_type": "plain" } ] }
//! ```
//!
//! `local_path` is relative to the manifest's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use supplynet_core::{ContentType, Timestamp};

use crate::files::FileError;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub url: String,
    pub local_path: PathBuf,
    #[serde(default)]
    pub content_type: Option<ContentType>,
    #[serde(default)]
    pub title: Option<String>,
    /// Retrieval time recorded on the document; defaults to the epoch so
    /// fixture runs are reproducible.
    #[serde(default)]
    pub retrieved_at: Option<i64>,
}

impl ManifestEntry {
    pub fn retrieved_at(&self) -> Timestamp {
        Timestamp(self.retrieved_at.unwrap_or(0))
    }
}

#[derive(Clone, Debug, Default)]
pub struct FixtureManifest {
    base_dir: PathBuf,
    entries: BTreeMap<String, Vec<ManifestEntry>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

impl FixtureManifest {
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base_dir).map_err(|message| ManifestError::Parse {
            path: path.display().to_string(),
            message,
        })
    }

    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, String> {
        let entries: BTreeMap<String, Vec<ManifestEntry>> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        Ok(FixtureManifest {
            base_dir: base_dir.into(),
            entries,
        })
    }

    /// Entries for a company, in manifest order.
    pub fn for_company(&self, company: &str) -> &[ManifestEntry] {
        self.entries.get(company).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn by_url(&self, url: &str) -> Option<&ManifestEntry> {
        self.entries.values().flatten().find(|e| e.url == url)
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.base_dir.join(&entry.local_path)
    }

    pub fn companies(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves() {
        let m = FixtureManifest::parse(
            r#"{"apple":[{"url":"https://a.example/1","local_path":"d/1.txt","content_type":"plain"},
                         {"url":"https://a.example/2.pdf","local_path":"d/2.pdf"}]}"#,
            "/fx",
        )
        .unwrap();
        assert_eq!(m.for_company("apple").len(), 2);
        assert!(m.for_company("pear").is_empty());
        let e = m.by_url("https://a.example/2.pdf").unwrap();
        assert_eq!(m.resolve(e), PathBuf::from("/fx/d/2.pdf"));
        assert_eq!(e.retrieved_at(), Timestamp(0));
        assert!(FixtureManifest::parse(r#"{"a":[{"url":"u"}]}"#, "/").is_err());
    }
}
