//! Atomic file emission and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::config::RunConfig;

/// Content hash with git blob framing: `sha256("blob <len>\0" ++ bytes)`.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    format!("{:x}", h.finalize())
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct OutputEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Serialize, Debug)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub outputs: Vec<OutputEntry>,
    pub failures: usize,
}

/// Collects emitted files so the manifest can list them.
pub struct Emitter {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
}

impl Emitter {
    pub fn new(dir: &Path) -> Self {
        Emitter {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        }
    }

    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.outputs.push(OutputEntry {
            file: name.to_string(),
            bytes: bytes.len(),
            sha256: content_hash(bytes),
        });
        Ok(path)
    }

    pub fn finish(self, config: &RunConfig, failures: usize) -> std::io::Result<PathBuf> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config,
            outputs: self.outputs,
            failures,
        };
        let mut json = serde_json::to_vec_pretty(&manifest).map_err(std::io::Error::other)?;
        json.push(b'\n');
        let path = self.dir.join("manifest.json");
        write_atomic(&path, &json)?;
        Ok(path)
    }
}
