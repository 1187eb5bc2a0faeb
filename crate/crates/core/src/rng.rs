//! Counter-based pseudo-random streams keyed by `(seed, domain, item, index)`.
//!
//! Every random quantity in a run is a pure function of its key, so the
//! values do not depend on evaluation order, thread count or platform.

use core::fmt::{self, Write};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Stream domain for chromosome jitter.
pub const DOMAIN_JITTER: u64 = 0x6a69_7474_6572;
/// Stream domain for built-in base vectors.
pub const DOMAIN_BASE_VECTOR: u64 = 0x0062_6173_6576_6563;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a, fed through [`fmt::Write`] so any `Display` key can be hashed
/// without an intermediate allocation.
#[derive(Debug, Clone)]
pub struct KeyHasher(u64);

impl KeyHasher {
    pub fn new() -> Self {
        KeyHasher(0xcbf2_9ce4_8422_2325)
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for KeyHasher {
    fn default() -> Self {
        Self::new()
    }
}

impl Write for KeyHasher {
    fn write_str(&mut self, s: &str) -> fmt::Result {
        self.write_bytes(s.as_bytes());
        Ok(())
    }
}

/// Hashes the `Display` form of an item key.
pub fn hash_display<T: fmt::Display + ?Sized>(item: &T) -> u64 {
    let mut h = KeyHasher::new();
    // Writing into KeyHasher never fails.
    let _ = write!(h, "{item}");
    h.finish()
}

/// A deterministic stream of 64-bit words: word `i` is `mix64(key + i * gamma)`.
#[derive(Debug, Clone)]
pub struct KeyedStream {
    key: u64,
    counter: u64,
}

impl KeyedStream {
    pub fn new(seed: u64, domain: u64, item_hash: u64, index: u64) -> Self {
        let mut key = mix64(seed ^ GOLDEN_GAMMA);
        key = mix64(key ^ domain);
        key = mix64(key ^ item_hash);
        key = mix64(key ^ index);
        KeyedStream { key, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(
            self.key
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-scale, scale)`.
    pub fn symmetric(&mut self, scale: f64) -> f64 {
        scale * (2.0 * self.next_f64() - 1.0)
    }
}
