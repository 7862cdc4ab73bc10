//! Repository-fixed pseudo-random number generator.
//!
//! Everything random in this crate (instance generation, isolation-forest
//! subsampling and splits, test data) flows through [`SplitMix64`] so that a
//! seed reproduces bit-identical results on every platform. SplitMix64 is
//! the mixing function of Steele, Lea and Flood; it passes BigCrush, has a
//! period of 2^64 and needs no warm-up.

/// SplitMix64 generator. State advances by the golden-ratio increment and
/// each output is a finalized mix of the new state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Stream derived from `(seed, index)`. Distinct indices give streams
    /// that are independent for practical purposes; used for per-window
    /// randomness so windows can be evaluated in any order.
    pub fn derived(seed: u64, index: u64) -> Self {
        let mut outer = SplitMix64::new(seed ^ index.wrapping_mul(GOLDEN));
        let s = outer.next_u64();
        SplitMix64::new(s)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits (exact mantissa division).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` by the multiply-shift reduction.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard normal deviate (Marsaglia polar method).
    pub fn next_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }
}
