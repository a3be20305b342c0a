//! Counter-based deterministic random number generation.
//!
//! The generator is the splitmix64 output function evaluated along a
//! counter: `out(j) = mix64(key + j * GAMMA)`. It is stateless apart from
//! the counter, so the j-th draw of a stream never depends on how many
//! draws were made before it, and the output is bit-identical across
//! platforms. Not cryptographically secure.

/// Weyl-sequence increment used by splitmix64 (golden-ratio constant).
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer: a bijective 64-bit mixer.
#[inline(always)]
pub fn mix64(z: u64) -> u64 {
    let mut z = z;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent sub-seed from a master seed and a stream index.
///
/// `mix64(master ^ mix64(stream + GAMMA))` — the inner mix decorrelates
/// consecutive stream indices, the outer mix folds in the master seed.
/// Distinct streams under one master always yield distinct keys.
#[inline]
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix64(master ^ mix64(stream.wrapping_add(GAMMA)))
}

/// Deterministic counter-based RNG stream.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform double in [0, 1) with 53 random bits.
    #[inline(always)]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound) by rejection-free modulo; bias is
    /// below 2^-32 for the small bounds used here.
    #[inline(always)]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }
}
