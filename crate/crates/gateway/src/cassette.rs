//! Recorded completions, one JSON object per line.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use logichint_prompt::{Strategy, Task};

use crate::backend::Request;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub hash: String,
    pub model: String,
    pub temperature: f64,
    pub task: Task,
    pub strategy: Strategy,
    pub text: String,
}

impl Entry {
    pub fn new(request: &Request, text: &str) -> Entry {
        Entry {
            hash: request.hash.clone(),
            model: request.model.clone(),
            temperature: request.temperature,
            task: request.task,
            strategy: request.strategy,
            text: text.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CassetteError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("corrupt cassette, line {line}: {message}")]
    Corrupt { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cassette {
    entries: Vec<Entry>,
    by_hash: HashMap<String, usize>,
}

impl Cassette {
    pub fn load(path: &Path) -> Result<Cassette, CassetteError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CassetteError::Read { path: path.to_path_buf(), source })?;
        Cassette::from_ndjson(&text)
    }

    /// Blank lines are skipped. A hash may repeat only with the same text.
    pub fn from_ndjson(text: &str) -> Result<Cassette, CassetteError> {
        let mut cassette = Cassette::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |message: String| CassetteError::Corrupt { line: i + 1, message };
            let entry: Entry = serde_json::from_str(line).map_err(|e| corrupt(e.to_string()))?;
            if entry.hash.len() != 64 || !entry.hash.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(corrupt(format!("`{}` is not a sha256 hex digest", entry.hash)));
            }
            if let Some(old) = cassette.get(&entry.hash) {
                if old.text != entry.text {
                    return Err(corrupt(format!("hash {} recorded twice with different text", entry.hash)));
                }
                continue;
            }
            cassette.insert(entry);
        }
        Ok(cassette)
    }

    pub fn to_ndjson(&self) -> String {
        self.entries.iter().map(|e| serde_json::to_string(e).expect("entries serialize") + "\n").collect()
    }

    pub fn save(&self, path: &Path) -> Result<(), CassetteError> {
        std::fs::write(path, self.to_ndjson()).map_err(|source| CassetteError::Write { path: path.to_path_buf(), source })
    }

    /// Adds or replaces the entry for `entry.hash`.
    pub fn insert(&mut self, entry: Entry) {
        match self.by_hash.get(&entry.hash) {
            Some(&i) => self.entries[i] = entry,
            None => {
                self.by_hash.insert(entry.hash.clone(), self.entries.len());
                self.entries.push(entry);
            }
        }
    }

    pub fn get(&self, hash: &str) -> Option<&Entry> {
        self.by_hash.get(hash).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
