//! Run manifests: configuration hashes and output checksums.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Hex sha256 of raw bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of a configuration's canonical JSON serialization.
pub fn config_hash<T: Serialize + ?Sized>(config: &T) -> Result<String> {
    Ok(sha256_hex(&serde_json::to_vec(config)?))
}
