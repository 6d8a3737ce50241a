//! Canonical-form digests for complexes, morphisms and traces.

use alloc::string::String;

/// 64-bit FNV-1a over a canonical byte encoding. Deterministic across
/// platforms; used for trace integrity checks, not adversarial settings.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn hex64(h: u64) -> String {
    use alloc::format;
    format!("{h:016x}")
}
