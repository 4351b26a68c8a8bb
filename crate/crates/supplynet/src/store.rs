//! On-disk intermediate store shared by the pipeline stages.
//!
//! Layout:
//!
//! ```text
//! <root>/<company_id>/status            one "<stage> <status>" line per stage
//! <root>/<company_id>/<stage>.blob      JSON result of the stage
//! <root>/<company_id>/docs/<sha256>.raw fetched payloads
//! ```
//!
//! Every file is replaced atomically. Once a stage is `done` its blob is never
//! rewritten unless the company is reset.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use supplynet_core::pipeline::{Stage, StageStatus};
use supplynet_core::CompanyId;
use thiserror::Error;

use crate::files::{write_atomic, FileError};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("intermediate store: {0}")]
    File(#[from] FileError),
    #[error("corrupt store entry {path}: {message}")]
    Corrupt { path: String, message: String },
}

#[derive(Clone, Debug)]
pub struct IntermediateStore {
    root: PathBuf,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl IntermediateStore {
    /// Opens (creating if needed) a store rooted at `root` and checks that it
    /// is writable.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| FileError::io(&root, e))?;
        let probe = root.join(".write-probe");
        write_atomic(&probe, b"ok")?;
        fs::remove_file(&probe).map_err(|e| FileError::io(&probe, e))?;
        Ok(IntermediateStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn company_dir(&self, company: &CompanyId) -> PathBuf {
        self.root.join(company.as_str())
    }

    fn blob_path(&self, company: &CompanyId, stage: Stage) -> PathBuf {
        self.company_dir(company).join(format!("{}.blob", stage.as_str()))
    }

    fn status_path(&self, company: &CompanyId) -> PathBuf {
        self.company_dir(company).join("status")
    }

    pub fn statuses(&self, company: &CompanyId) -> Result<BTreeMap<Stage, StageStatus>, StoreError> {
        let path = self.status_path(company);
        let mut out: BTreeMap<Stage, StageStatus> = Stage::ALL.into_iter().map(|s| (s, StageStatus::Pending)).collect();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(FileError::io(&path, e).into()),
        };
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let corrupt = |message: String| StoreError::Corrupt {
                path: path.display().to_string(),
                message,
            };
            let (stage, status) = line
                .split_once(' ')
                .ok_or_else(|| corrupt(format!("bad status line {line:?}")))?;
            out.insert(stage.parse().map_err(corrupt)?, status.trim().parse().map_err(corrupt)?);
        }
        Ok(out)
    }

    pub fn status(&self, company: &CompanyId, stage: Stage) -> Result<StageStatus, StoreError> {
        Ok(self.statuses(company)?[&stage])
    }

    pub fn set_status(&self, company: &CompanyId, stage: Stage, status: StageStatus) -> Result<(), StoreError> {
        let mut all = self.statuses(company)?;
        all.insert(stage, status);
        let text: String = all.iter().map(|(s, st)| format!("{} {}\n", s.as_str(), st.as_str())).collect();
        write_atomic(&self.status_path(company), text.as_bytes())?;
        Ok(())
    }

    pub fn read_blob<T: DeserializeOwned>(&self, company: &CompanyId, stage: Stage) -> Result<Option<T>, StoreError> {
        let path = self.blob_path(company, stage);
        match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map(Some).map_err(|e| StoreError::Corrupt {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(FileError::io(&path, e).into()),
        }
    }

    /// Writes the stage result and marks the stage done. A stage that is
    /// already done is left untouched.
    pub fn complete<T: Serialize>(&self, company: &CompanyId, stage: Stage, blob: &T) -> Result<(), StoreError> {
        if self.status(company, stage)? == StageStatus::Done {
            return Ok(());
        }
        let bytes = serde_json::to_vec_pretty(blob).expect("stage blobs serialize");
        write_atomic(&self.blob_path(company, stage), &bytes)?;
        self.set_status(company, stage, StageStatus::Done)
    }

    /// Forgets every stage result of `company`.
    pub fn reset(&self, company: &CompanyId) -> Result<(), StoreError> {
        let dir = self.company_dir(company);
        match fs::remove_dir_all(&dir) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
            Err(e) => Err(FileError::io(&dir, e).into()),
        }
    }

    /// Stores a raw payload under its content hash and returns the hash.
    pub fn put_raw(&self, company: &CompanyId, bytes: &[u8]) -> Result<String, StoreError> {
        let hash = sha256_hex(bytes);
        let path = self.company_dir(company).join("docs").join(format!("{hash}.raw"));
        if !path.exists() {
            write_atomic(&path, bytes)?;
        }
        Ok(hash)
    }

    pub fn get_raw(&self, company: &CompanyId, hash: &str) -> Result<Vec<u8>, StoreError> {
        let path = self.company_dir(company).join("docs").join(format!("{hash}.raw"));
        fs::read(&path).map_err(|e| FileError::io(&path, e).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_and_blob_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = IntermediateStore::open(dir.path().join("store")).unwrap();
        let c = CompanyId::new("acme").unwrap();
        assert_eq!(store.status(&c, Stage::Search).unwrap(), StageStatus::Pending);
        assert_eq!(store.read_blob::<Vec<u32>>(&c, Stage::Search).unwrap(), None);
        store.complete(&c, Stage::Search, &vec![1u32, 2]).unwrap();
        assert_eq!(store.status(&c, Stage::Search).unwrap(), StageStatus::Done);
        // a done blob is immutable
        store.complete(&c, Stage::Search, &vec![9u32]).unwrap();
        assert_eq!(store.read_blob::<Vec<u32>>(&c, Stage::Search).unwrap(), Some(vec![1, 2]));
        store.set_status(&c, Stage::Fetch, StageStatus::Failed).unwrap();
        let text = fs::read_to_string(dir.path().join("store/acme/status")).unwrap();
        assert!(text.contains("search done\n") && text.contains("fetch failed\n"));
        store.reset(&c).unwrap();
        assert_eq!(store.status(&c, Stage::Search).unwrap(), StageStatus::Pending);
    }

    #[test]
    fn raw_payloads_are_content_addressed() {
        let dir = tempfile::tempdir().unwrap();
        let store = IntermediateStore::open(dir.path()).unwrap();
        let c = CompanyId::new("acme").unwrap();
        let h = store.put_raw(&c, b"hello").unwrap();
        assert_eq!(h, "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824");
        assert_eq!(store.get_raw(&c, &h).unwrap(), b"hello");
    }

    #[test]
    fn unwritable_root_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain-file");
        fs::write(&file, "x").unwrap();
        assert!(IntermediateStore::open(file.join("store")).is_err());
    }
}
