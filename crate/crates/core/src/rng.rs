//! SplitMix64, the only source of randomness in the crate.
//!
//! The state is an explicit value so every stream is reproducible from its
//! seed on any platform.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[lo, hi]`.
    ///
    /// Uses fixed-point scaling with no rejection: the 64-bit output is read
    /// as a fraction `u / 2^64` and multiplied by the span, keeping the high
    /// word of the 128-bit product. Exactly one generator step is consumed per
    /// call, and the bias is below `span / 2^64`.
    pub fn uniform(&mut self, lo: i64, hi: i64) -> Result<i64> {
        if lo > hi {
            return Err(Error::Argument(format!("uniform range [{lo}, {hi}] is empty")));
        }
        let span = (hi as i128 - lo as i128 + 1) as u128;
        let offset = (self.next_u64() as u128 * span) >> 64;
        Ok((lo as i128 + offset as i128) as i64)
    }

    /// Infallible `uniform` for ranges known to be non-empty.
    pub fn range_u32(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u128 + 1;
        lo + ((self.next_u64() as u128 * span) >> 64) as u32
    }

    pub fn index(&mut self, len: usize) -> usize {
        debug_assert!(len > 0);
        ((self.next_u64() as u128 * len as u128) >> 64) as usize
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }
}
