//! Seeds derived from a base seed and a string key.

use sha2::{Digest, Sha256};

/// First eight bytes of SHA-256 over `(base, key, index)`, little endian.
///
/// Stable across platforms, releases, and thread schedules, unlike
/// `std::hash`.
pub fn stable_hash(base: u64, key: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    h.update((key.len() as u64).to_le_bytes());
    h.update(key.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}
