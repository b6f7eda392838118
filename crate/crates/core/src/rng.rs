//! Keyed, counter-based randomness.
//!
//! Every draw is a pure function of `(seed, stream path, key)`, so center
//! sampling and weight assignment do not depend on iteration order or on the
//! number of worker threads. The mixing function is the SplitMix64 finalizer.

/// A seeded stream. Substreams are derived by hashing a tag into the state;
/// draws are addressed by an explicit key rather than consumed sequentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rng {
    seed: u64,
    stream: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hash_tag(tag: &str) -> u64 {
    tag.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            seed,
            stream: mix(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream named by `tag`.
    pub fn substream(&self, tag: &str) -> Self {
        Rng {
            seed: self.seed,
            stream: mix(self.stream ^ mix(hash_tag(tag))),
        }
    }

    /// Child stream indexed by an integer (stage number, component id, ...).
    pub fn substream_at(&self, index: u64) -> Self {
        Rng {
            seed: self.seed,
            stream: mix(self.stream.wrapping_add(mix(index ^ 0x5851_f42d_4c95_7f2d))),
        }
    }

    /// Raw 64-bit draw addressed by a two-part key.
    pub fn bits(&self, a: u64, b: u64) -> u64 {
        mix(mix(self.stream ^ mix(a)).wrapping_add(b))
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn unit(&self, a: u64, b: u64) -> f64 {
        (self.bits(a, b) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(0, 1]`.
    pub fn unit_open_closed(&self, a: u64, b: u64) -> f64 {
        1.0 - self.unit(a, b)
    }

    /// Uniform integer in `0..bound`.
    pub fn below(&self, a: u64, b: u64, bound: u64) -> u64 {
        assert!(bound > 0);
        ((self.bits(a, b) as u128 * bound as u128) >> 64) as u64
    }
}
