//! SplitMix64 random stream and seed derivation.
//!
//! The generator is the published SplitMix64 algorithm: the state advances by
//! the golden-ratio increment `0x9E3779B97F4A7C15` and each output is the
//! state passed through the finalizer
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! Uniform variates take the top 53 bits: `(x >> 11) * 2^-53`, giving values
//! in `[0, 1)`.

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `index` of a run family with base seed `base`.
///
/// Equals `mix64(base + (index + 1) * GOLDEN_GAMMA)` with wrapping arithmetic,
/// i.e. the `index`-th output of a SplitMix64 generator seeded with `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// A source of uniform `[0, 1)` variates. Every call consumes one draw.
pub trait RandomStream {
    fn next_uniform(&mut self) -> f64;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}

impl RandomStream for SplitMix64 {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
