//! Counter-based random draws.
//!
//! Every draw is a pure function of `(seed, stream, a, b)`, so any value can be
//! regenerated without replaying the ones before it. Environment deltas use
//! `(epoch, transition index)` as the counter; agents use their own stream.

/// Stream tags; distinct streams never share draws for the same seed.
pub const ENVIRONMENT_STREAM: u64 = 0x656e_7669_726f_6e00;
pub const AGENT_STREAM: u64 = 0x6167_656e_7400_0000;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            key: splitmix(splitmix(seed) ^ stream),
        }
    }

    /// Raw 64-bit word for counter `(a, b, attempt)`.
    pub fn word(&self, a: u64, b: u64, attempt: u64) -> u64 {
        let h = splitmix(self.key ^ a);
        let h = splitmix(h ^ b.rotate_left(17));
        splitmix(h ^ attempt.rotate_left(41))
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn unit(&self, a: u64, b: u64) -> f64 {
        (self.word(a, b, 0) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform integer in `[0, bound)`. `bound` must be non-zero.
    pub fn below(&self, a: u64, b: u64, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Reject the tail of the 64-bit range that would bias the modulo.
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        let mut attempt = 0;
        loop {
            let w = self.word(a, b, attempt);
            if w <= zone {
                return w % bound;
            }
            attempt += 1;
        }
    }
}
