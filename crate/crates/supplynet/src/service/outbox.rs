//! Append-only notification outbox.
//!
//! When backed by a file, every change is one appended JSON line: either a new
//! entry or a delivery mark. Replaying the file rebuilds the outbox.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use supplynet_core::Timestamp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    AddedAsSupplier,
    Verification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutboxEntry {
    pub id: u64,
    pub to: String,
    pub subject: String,
    pub body: String,
    pub cause: Cause,
    pub created_at: Timestamp,
    pub delivered: bool,
    /// Identity of the event; a second entry with the same key is never added.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Line {
    Append { entry: OutboxEntry },
    Delivered { id: u64 },
}

#[derive(Debug, Default)]
pub struct Outbox {
    entries: Vec<OutboxEntry>,
    keys: HashSet<String>,
    file: Option<PathBuf>,
}

pub struct NewEntry<'a> {
    pub to: &'a str,
    pub subject: String,
    pub body: String,
    pub cause: Cause,
    pub key: Option<String>,
}

impl Outbox {
    pub fn in_memory() -> Self {
        Outbox::default()
    }

    /// Opens a file-backed outbox, replaying existing lines.
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let mut outbox = Outbox {
            file: Some(path.to_path_buf()),
            ..Outbox::default()
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(outbox),
            Err(e) => return Err(e),
        };
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(&line).map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("outbox line {}: {e}", n + 1))
            })?;
            match parsed {
                Line::Append { entry } => outbox.insert(entry),
                Line::Delivered { id } => {
                    if let Some(e) = outbox.entries.iter_mut().find(|e| e.id == id) {
                        e.delivered = true;
                    }
                }
            }
        }
        Ok(outbox)
    }

    fn insert(&mut self, entry: OutboxEntry) {
        if let Some(k) = &entry.key {
            self.keys.insert(k.clone());
        }
        self.entries.push(entry);
    }

    fn persist(&self, line: &Line) -> std::io::Result<()> {
        let Some(path) = &self.file else {
            return Ok(());
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut text = serde_json::to_string(line).expect("outbox lines serialize");
        text.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(text.as_bytes())?;
        f.sync_data()
    }

    /// Appends an entry unless its key was seen before; returns the new id.
    pub fn append(&mut self, new: NewEntry<'_>, at: Timestamp) -> std::io::Result<Option<u64>> {
        if new.key.as_ref().is_some_and(|k| self.keys.contains(k)) {
            return Ok(None);
        }
        let entry = OutboxEntry {
            id: self.entries.last().map_or(1, |e| e.id + 1),
            to: new.to.to_string(),
            subject: new.subject,
            body: new.body,
            cause: new.cause,
            created_at: at,
            delivered: false,
            key: new.key,
        };
        self.persist(&Line::Append { entry: entry.clone() })?;
        let id = entry.id;
        self.insert(entry);
        Ok(Some(id))
    }

    /// Marks an entry delivered; returns false when it already was or does not exist.
    pub fn mark_delivered(&mut self, id: u64) -> std::io::Result<bool> {
        match self.entries.iter().position(|e| e.id == id) {
            Some(i) if !self.entries[i].delivered => {
                self.persist(&Line::Delivered { id })?;
                self.entries[i].delivered = true;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    pub fn entries(&self) -> &[OutboxEntry] {
        &self.entries
    }

    pub fn pending(&self) -> impl Iterator<Item = &OutboxEntry> {
        self.entries.iter().filter(|e| !e.delivered)
    }
}
