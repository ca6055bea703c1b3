//! Resumable sweep checkpointing: one JSON line per finished grid point,
//! keyed by a parameter hash; rerunning skips finished keys.

use serde::Serialize;
use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use svstab::error::Result;

pub struct Checkpoint {
    path: PathBuf,
    done: HashMap<String, serde_json::Value>,
}

impl Checkpoint {
    pub fn open(dir: &std::path::Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("checkpoint.jsonl");
        let mut done = HashMap::new();
        if path.exists() {
            let file = std::fs::File::open(&path)?;
            for line in std::io::BufReader::new(file).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                if let Ok(v) = serde_json::from_str::<serde_json::Value>(&line) {
                    if let Some(key) = v.get("key").and_then(|k| k.as_str()) {
                        done.insert(key.to_string(), v["value"].clone());
                    }
                }
            }
        }
        Ok(Checkpoint { path, done })
    }

    pub fn key(parts: &[String]) -> String {
        parts.join("|")
    }

    pub fn get(&self, key: &str) -> Option<&serde_json::Value> {
        self.done.get(key)
    }

    pub fn record<T: Serialize>(&mut self, key: &str, value: &T) -> Result<()> {
        let val = serde_json::to_value(value)
            .map_err(|e| svstab::error::Error::Io(e.to_string()))?;
        let line = serde_json::json!({"key": key, "value": val});
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        writeln!(f, "{line}")?;
        f.flush()?;
        self.done.insert(key.to_string(), val);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.done.len()
    }

    pub fn is_empty(&self) -> bool {
        self.done.is_empty()
    }
}
