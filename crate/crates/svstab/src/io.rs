//! Artifact persistence: CSV/JSON writers with atomic replace, plus the
//! reproducibility manifest attached to every command output.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Write bytes atomically (temp file + rename in the target directory).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp: PathBuf = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "artifact".into()),
        std::process::id()
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let body = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Io(format!("serialize {}: {e}", path.display())))?;
    atomic_write(path, &body)
}

/// CSV from rows of stringifiable columns.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Reproducibility manifest stored next to each artifact set.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: serde_json::Value,
    pub tolerances: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, parameters: serde_json::Value, tolerances: serde_json::Value) -> Self {
        Manifest {
            tool: "svstab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            parameters,
            tolerances,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("manifest.json"), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_roundtrip() {
        let dir = std::env::temp_dir().join(format!("svstab-io-test-{}", std::process::id()));
        let path = dir.join("x.csv");
        write_csv(&path, &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        let body = fs::read_to_string(&path).unwrap();
        assert_eq!(body, "a,b\n1,2\n");
        fs::remove_dir_all(&dir).unwrap();
    }
}
