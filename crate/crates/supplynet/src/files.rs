//! Snapshot files, atomic writes and the snapshot lock file.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use supplynet_core::{snapshot, SnapshotError, SupplyGraph};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Snapshot { path: String, source: SnapshotError },
    #[error("{path} is locked by another process (remove the lock file if it is stale)")]
    Locked { path: String },
}

impl FileError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        FileError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FileError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| FileError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| FileError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| FileError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| FileError::io(path, e))?;
    tmp.persist(path).map_err(|e| FileError::io(path, e.error))?;
    Ok(())
}

pub fn save_snapshot(graph: &SupplyGraph, path: &Path) -> Result<(), FileError> {
    write_atomic(path, snapshot::encode(graph).as_bytes())
}

pub fn load_snapshot(path: &Path) -> Result<SupplyGraph, FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
    snapshot::decode(&text).map_err(|source| FileError::Snapshot {
        path: path.display().to_string(),
        source,
    })
}

/// Exclusive lock beside a snapshot file, released on drop.
#[derive(Debug)]
pub struct SnapshotLock {
    path: PathBuf,
}

impl SnapshotLock {
    pub fn lock_path(snapshot: &Path) -> PathBuf {
        let mut name = snapshot.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".lock");
        snapshot.with_file_name(name)
    }

    pub fn acquire(snapshot: &Path) -> Result<Self, FileError> {
        let path = Self::lock_path(snapshot);
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| FileError::io(dir, e))?;
        }
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(SnapshotLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(FileError::Locked {
                path: path.display().to_string(),
            }),
            Err(e) => Err(FileError::io(&path, e)),
        }
    }
}

impl Drop for SnapshotLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
