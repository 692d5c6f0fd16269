use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// SHA-256 over `blob <len>\0` followed by the content, as git does for blobs.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub role: &'static str,
    pub path: String,
    pub bytes: usize,
    pub blob_sha256: String,
}

impl InputRecord {
    pub fn new(role: &'static str, path: &Path, bytes: &[u8]) -> Self {
        InputRecord {
            role,
            path: path.display().to_string(),
            bytes: bytes.len(),
            blob_sha256: blob_hash(bytes),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a C,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
}
