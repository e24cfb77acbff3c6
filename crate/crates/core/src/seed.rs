//! Seed fan-out.
//!
//! A single global seed reproduces a full audit. Each component derives its
//! own seed as the first eight bytes (little endian) of
//! `SHA-256("<global seed in decimal>/<component path>")`, so adding a new
//! component never shifts the seeds of existing ones.
//!
//! All random streams use ChaCha8, which is specified bit-for-bit and
//! therefore identical on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn derive_seed(global: u64, component: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(global.to_string().as_bytes());
    hasher.update(b"/");
    hasher.update(component.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_stable_and_component_specific() {
        assert_eq!(derive_seed(42, "lda"), derive_seed(42, "lda"));
        assert_ne!(derive_seed(42, "lda"), derive_seed(42, "split"));
        assert_ne!(derive_seed(42, "lda"), derive_seed(43, "lda"));
    }

    #[test]
    fn derived_seed_matches_reference_digest() {
        // First eight bytes of sha256(b"42/lda"), little endian.
        assert_eq!(derive_seed(42, "lda"), 3945604593640281286);
    }

    #[test]
    fn chacha_stream_is_pinned() {
        // Guards against silent generator changes across dependency upgrades.
        let mut r = rng(7);
        let got: Vec<u32> = (0..4).map(|_| r.gen()).collect();
        assert_eq!(got, [601310139, 677729076, 781920570, 721508819]);
    }
}
