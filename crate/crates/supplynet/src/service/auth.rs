//! Representative claims and API tokens.
//!
//! Codes and tokens are random hex strings; only their SHA-256 digests are
//! kept, so a leaked state file does not leak credentials.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use supplynet_core::{CompanyId, Timestamp};

use crate::files::{write_atomic, FileError};
use crate::store::sha256_hex;

pub const CODE_TTL_SECS: i64 = 24 * 60 * 60;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentativeClaim {
    pub company: CompanyId,
    pub email: String,
    pub created_at: Timestamp,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiToken {
    pub company: CompanyId,
    pub issued_at: Timestamp,
    pub revoked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyError {
    UnknownCode,
    Expired,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct State {
    // digest -> record
    claims: BTreeMap<String, RepresentativeClaim>,
    tokens: BTreeMap<String, ApiToken>,
}

#[derive(Debug, Default)]
pub struct AuthStore {
    state: State,
    file: Option<PathBuf>,
    code_ttl: i64,
    token_ttl: Option<i64>,
}

fn random_hex<const N: usize>() -> String {
    hex::encode(rand::random::<[u8; N]>())
}

impl AuthStore {
    pub fn in_memory() -> Self {
        AuthStore {
            code_ttl: CODE_TTL_SECS,
            ..AuthStore::default()
        }
    }

    pub fn open(path: &Path) -> Result<Self, FileError> {
        let state = match std::fs::read(path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(|e| {
                FileError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e))
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => State::default(),
            Err(e) => return Err(FileError::io(path, e)),
        };
        Ok(AuthStore {
            state,
            file: Some(path.to_path_buf()),
            code_ttl: CODE_TTL_SECS,
            token_ttl: None,
        })
    }

    pub fn with_ttls(mut self, code_ttl_secs: i64, token_ttl_secs: Option<i64>) -> Self {
        self.code_ttl = code_ttl_secs;
        self.token_ttl = token_ttl_secs;
        self
    }

    fn persist(&self) -> Result<(), FileError> {
        match &self.file {
            Some(path) => write_atomic(path, &serde_json::to_vec_pretty(&self.state).expect("auth state serializes")),
            None => Ok(()),
        }
    }

    /// Records a claim and returns its verification code.
    pub fn claim(&mut self, company: CompanyId, email: &str, at: Timestamp) -> Result<String, FileError> {
        let code = random_hex::<16>();
        self.state.claims.insert(
            sha256_hex(code.as_bytes()),
            RepresentativeClaim {
                company,
                email: email.to_string(),
                created_at: at,
                verified: false,
            },
        );
        self.persist()?;
        Ok(code)
    }

    /// Exchanges an unused, unexpired code for a new 256-bit token.
    pub fn verify(&mut self, code: &str, at: Timestamp) -> Result<Result<(String, ApiToken), VerifyError>, FileError> {
        let digest = sha256_hex(code.trim().as_bytes());
        let Some(claim) = self.state.claims.get_mut(&digest) else {
            return Ok(Err(VerifyError::UnknownCode));
        };
        if claim.verified {
            return Ok(Err(VerifyError::UnknownCode));
        }
        if at.0 - claim.created_at.0 > self.code_ttl {
            return Ok(Err(VerifyError::Expired));
        }
        claim.verified = true;
        let token = random_hex::<32>();
        let record = ApiToken {
            company: claim.company.clone(),
            issued_at: at,
            revoked: false,
        };
        self.state.tokens.insert(sha256_hex(token.as_bytes()), record.clone());
        self.persist()?;
        Ok(Ok((token, record)))
    }

    /// The company a live token is bound to.
    pub fn resolve(&self, token: &str, at: Timestamp) -> Option<&CompanyId> {
        let record = self.state.tokens.get(&sha256_hex(token.as_bytes()))?;
        let expired = self.token_ttl.is_some_and(|ttl| at.0 - record.issued_at.0 > ttl);
        (!record.revoked && !expired).then_some(&record.company)
    }

    pub fn revoke(&mut self, token: &str) -> Result<bool, FileError> {
        match self.state.tokens.get_mut(&sha256_hex(token.as_bytes())) {
            Some(record) if !record.revoked => {
                record.revoked = true;
                self.persist()?;
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acme() -> CompanyId {
        CompanyId::new("acme").unwrap()
    }

    #[test]
    fn claim_verify_resolve_revoke() {
        let mut a = AuthStore::in_memory();
        let code = a.claim(acme(), "rep@acme.example", Timestamp(0)).unwrap();
        assert_eq!(code.len(), 32);
        let (token, record) = a.verify(&code, Timestamp(10)).unwrap().unwrap();
        assert_eq!(token.len(), 64);
        assert_eq!(record.company, acme());
        assert_eq!(a.resolve(&token, Timestamp(11)), Some(&acme()));
        assert_eq!(a.verify(&code, Timestamp(12)).unwrap(), Err(VerifyError::UnknownCode));
        assert!(a.revoke(&token).unwrap());
        assert_eq!(a.resolve(&token, Timestamp(13)), None);
        assert_eq!(a.resolve("nope", Timestamp(13)), None);
    }

    #[test]
    fn codes_expire_after_a_day() {
        let mut a = AuthStore::in_memory();
        let code = a.claim(acme(), "rep@acme.example", Timestamp(0)).unwrap();
        assert_eq!(a.verify(&code, Timestamp(CODE_TTL_SECS + 1)).unwrap(), Err(VerifyError::Expired));
        let code = a.claim(acme(), "rep@acme.example", Timestamp(0)).unwrap();
        assert!(a.verify(&code, Timestamp(CODE_TTL_SECS)).unwrap().is_ok());
    }

    #[test]
    fn persisted_state_keeps_only_digests() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("auth.json");
        let mut a = AuthStore::open(&path).unwrap();
        let code = a.claim(acme(), "rep@acme.example", Timestamp(0)).unwrap();
        let (token, _) = a.verify(&code, Timestamp(1)).unwrap().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains(&code) && !text.contains(&token));
        let reopened = AuthStore::open(&path).unwrap();
        assert_eq!(reopened.resolve(&token, Timestamp(2)), Some(&acme()));
    }

    #[test]
    fn token_ttl_is_optional() {
        let mut a = AuthStore::in_memory().with_ttls(CODE_TTL_SECS, Some(100));
        let code = a.claim(acme(), "rep@acme.example", Timestamp(0)).unwrap();
        let (token, _) = a.verify(&code, Timestamp(0)).unwrap().unwrap();
        assert!(a.resolve(&token, Timestamp(100)).is_some());
        assert!(a.resolve(&token, Timestamp(101)).is_none());
    }
}
