//! Deterministic counted hash streams.
//!
//! Every random choice in the oracle derives from a `(seed, purpose, instance)`
//! triple via a counted SplitMix64 stream, so reports are bit-reproducible and
//! certificates can cite the seed they were produced from.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// A deterministic stream of pseudo-random words keyed by
/// `(seed, purpose tag, instance index)`.
#[derive(Debug, Clone)]
pub struct HashStream {
    key: u64,
    counter: u64,
}

impl HashStream {
    pub fn new(seed: u64, purpose: &str, instance: u64) -> Self {
        let key = splitmix64(seed)
            ^ splitmix64(fnv1a(purpose.as_bytes()))
            ^ splitmix64(instance.wrapping_mul(GOLDEN));
        Self { key, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        splitmix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform value in `[0, bound)` by rejection sampling; `bound > 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    pub fn field_elem(&mut self, p: u64) -> u64 {
        self.below(p)
    }

    pub fn nonzero_field_elem(&mut self, p: u64) -> u64 {
        1 + self.below(p - 1)
    }

    pub fn bit(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic() {
        let mut a = HashStream::new(42, "points", 3);
        let mut b = HashStream::new(42, "points", 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn purpose_and_instance_separate_streams() {
        let mut a = HashStream::new(42, "points", 0);
        let mut b = HashStream::new(42, "model", 0);
        let mut c = HashStream::new(42, "points", 1);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn below_is_in_range() {
        let mut s = HashStream::new(7, "range", 0);
        for _ in 0..1000 {
            assert!(s.below(13) < 13);
            let f = s.field_elem(1_000_003);
            assert!(f < 1_000_003);
            let nz = s.nonzero_field_elem(1_000_003);
            assert!(nz >= 1 && nz < 1_000_003);
        }
    }
}
