//! Service configuration: TOML file plus `SUPPLYNET_*` environment overrides.
//!
//! ```toml
//! listen = "127.0.0.1"
//! port = 8080
//! snapshot = "graph.dat"
//! state_dir = "state"          # outbox.jsonl and auth.json
//! code_ttl_secs = 86400
//! token_ttl_secs = 2592000     # omit for tokens that live until revoked
//! match_threshold = 0.9
//!
//! [smtp]
//! host = "localhost"
//! port = 25
//! from = "platform@example.org"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use supplynet_core::matching::DEFAULT_THRESHOLD;

use crate::service::auth::CODE_TTL_SECS;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmtpConfig {
    pub host: String,
    #[serde(default = "default_smtp_port")]
    pub port: u16,
    pub from: String,
}

fn default_smtp_port() -> u16 {
    25
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub listen: String,
    pub port: u16,
    pub snapshot: Option<PathBuf>,
    pub state_dir: Option<PathBuf>,
    pub code_ttl_secs: i64,
    pub token_ttl_secs: Option<i64>,
    pub match_threshold: f64,
    pub smtp: Option<SmtpConfig>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: "127.0.0.1".into(),
            port: 8080,
            snapshot: None,
            state_dir: None,
            code_ttl_secs: CODE_TTL_SECS,
            token_ttl_secs: None,
            match_threshold: DEFAULT_THRESHOLD,
            smtp: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid value for {key}: {value:?}")]
    Invalid { key: String, value: String },
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let read_err = |message: String| ConfigError::Read {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| read_err(e.to_string()))?;
        Self::from_toml(&text).map_err(read_err)
    }

    /// Applies `SUPPLYNET_LISTEN`, `SUPPLYNET_PORT`, `SUPPLYNET_SNAPSHOT`,
    /// `SUPPLYNET_STATE_DIR`, `SUPPLYNET_TOKEN_TTL_SECS`,
    /// `SUPPLYNET_SMTP_HOST`, `SUPPLYNET_SMTP_PORT` and `SUPPLYNET_SMTP_FROM`.
    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(key: &str, value: String) -> Result<T, ConfigError> {
            value.trim().parse().map_err(|_| ConfigError::Invalid {
                key: key.to_string(),
                value,
            })
        }
        if let Some(v) = var("SUPPLYNET_LISTEN") {
            self.listen = v;
        }
        if let Some(v) = var("SUPPLYNET_PORT") {
            self.port = parse("SUPPLYNET_PORT", v)?;
        }
        if let Some(v) = var("SUPPLYNET_SNAPSHOT") {
            self.snapshot = Some(v.into());
        }
        if let Some(v) = var("SUPPLYNET_STATE_DIR") {
            self.state_dir = Some(v.into());
        }
        if let Some(v) = var("SUPPLYNET_TOKEN_TTL_SECS") {
            self.token_ttl_secs = Some(parse("SUPPLYNET_TOKEN_TTL_SECS", v)?);
        }
        if let Some(host) = var("SUPPLYNET_SMTP_HOST") {
            let from = var("SUPPLYNET_SMTP_FROM")
                .or_else(|| self.smtp.as_ref().map(|s| s.from.clone()))
                .unwrap_or_else(|| "noreply@localhost".into());
            let port = match var("SUPPLYNET_SMTP_PORT") {
                Some(p) => parse("SUPPLYNET_SMTP_PORT", p)?,
                None => self.smtp.as_ref().map_or(25, |s| s.port),
            };
            self.smtp = Some(SmtpConfig { host, port, from });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn file_then_env() {
        let mut c = ServiceConfig::from_toml("port = 9000\nsnapshot = \"g.dat\"\n[smtp]\nhost = \"mx\"\nfrom = \"a@b.c\"\n").unwrap();
        assert_eq!(c.port, 9000);
        assert_eq!(c.smtp.as_ref().unwrap().port, 25);
        let env: HashMap<&str, &str> = [("SUPPLYNET_PORT", "9100"), ("SUPPLYNET_SMTP_PORT", "2525")].into();
        c.apply_env(|k| env.get(k).map(|v| v.to_string())).unwrap();
        assert_eq!(c.port, 9100);
        // smtp port alone does not configure smtp without a host override
        assert_eq!(c.smtp.as_ref().unwrap().port, 25);
        assert!(c.apply_env(|k| (k == "SUPPLYNET_PORT").then(|| "x".to_string())).is_err());
        assert!(ServiceConfig::from_toml("bogus = 1").is_err());
    }
}
