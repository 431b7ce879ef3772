//! JSON-lines artifact cache: one entry per line, shaped
//! {"version": N, "key": "...", "payload": ...}. Entries from other format
//! versions are ignored, unreadable lines are skipped with a warning, and a
//! failing write downgrades the run to uncached instead of aborting it.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

/// Bump to invalidate every existing entry on format changes.
pub const CACHE_VERSION: u64 = 1;

pub struct Cache {
    file: PathBuf,
    entries: HashMap<String, Value>,
}

impl Cache {
    /// Loads `dir/cache.jsonl`, creating the directory when missing.
    pub fn open(dir: &Path, warn: &mut dyn Write) -> Cache {
        if let Err(e) = fs::create_dir_all(dir) {
            let _ = writeln!(
                warn,
                "warning: cannot create cache directory {}: {e}; proceeding uncached",
                dir.display()
            );
        }
        let file = dir.join("cache.jsonl");
        let mut entries = HashMap::new();
        if let Ok(text) = fs::read_to_string(&file) {
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let parsed: Option<(u64, String, Value)> =
                    serde_json::from_str::<Value>(line).ok().and_then(|v| {
                        Some((
                            v.get("version")?.as_u64()?,
                            v.get("key")?.as_str()?.to_string(),
                            v.get("payload")?.clone(),
                        ))
                    });
                match parsed {
                    Some((version, key, payload)) => {
                        // Older or newer formats are stale by definition; the
                        // entry is simply recomputed, no warning needed.
                        if version == CACHE_VERSION {
                            entries.insert(key, payload);
                        }
                    }
                    None => {
                        let _ = writeln!(
                            warn,
                            "warning: cache {}:{}: unreadable entry, skipping",
                            file.display(),
                            i + 1
                        );
                    }
                }
            }
        }
        Cache { file, entries }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    /// Appends one line; a whole entry is written in a single call so
    /// concurrent readers never see a torn line.
    pub fn put(&mut self, key: &str, payload: Value, warn: &mut dyn Write) {
        let line = serde_json::json!({
            "version": CACHE_VERSION,
            "key": key,
            "payload": payload,
        });
        let appended = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.file)
            .and_then(|mut f| writeln!(f, "{line}"));
        if let Err(e) = appended {
            let _ = writeln!(
                warn,
                "warning: cache write to {} failed: {e}; continuing uncached",
                self.file.display()
            );
        }
        self.entries.insert(key.to_string(), payload);
    }
}
