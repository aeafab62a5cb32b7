//! Sub-seed derivation from one top-level seed.

use sha2::{Digest, Sha256};

/// First eight bytes (little endian) of `SHA-256(seed_le || name)`.
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}
