//! Counter-based deterministic random numbers.
//!
//! Every random draw in the crate flows through [`CounterRng`]: a SplitMix64
//! finalizer applied to `hash(stream_key, counter)`. Streams are derived by
//! hashing labels and indices into the key, so per-trial / per-record draws
//! are independent of evaluation order and bit-exact across platforms.

/// SplitMix64 finalizer. Good avalanche behaviour for cheap key mixing.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a key with one more word, order-sensitively.
#[inline]
pub fn hash2(a: u64, b: u64) -> u64 {
    mix64(a ^ mix64(b).rotate_left(17))
}

/// Derives a stream key from a seed and a list of labels/indices.
pub fn derive_stream(seed: u64, words: &[u64]) -> u64 {
    let mut key = mix64(seed);
    for &w in words {
        key = hash2(key, w);
    }
    key
}

/// A stateless counter RNG: draw `i` of stream `key` is `mix64(key ^ f(i))`.
///
/// Cloning or re-creating with the same key replays the stream exactly.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    /// Stream for `(seed, words...)`, e.g. `from_parts(seed, &[trial])`.
    pub fn from_parts(seed: u64, words: &[u64]) -> Self {
        Self::new(derive_stream(seed, words))
    }

    /// The value at an explicit counter, without touching the cursor.
    #[inline]
    pub fn at(&self, counter: u64) -> u64 {
        mix64(self.key ^ counter.wrapping_mul(0xd1b5_4a32_d192_ed03))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = self.at(self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)` by rejection-free scaling (n small here).
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, data: &mut [T]) {
        for i in (1..data.len()).rev() {
            let j = self.below(i + 1);
            data.swap(i, j);
        }
    }
}
