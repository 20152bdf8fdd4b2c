//! Seeded random streams for disorder realizations.
//!
//! Every stream is a xoshiro256++ generator whose 256-bit state is filled
//! from a SplitMix64 sequence started at a 64-bit seed. Per-realization seeds
//! come from [`substream_seed`], so the draws of realization `r` depend only
//! on `(base_seed, r, tag)` and never on scheduling or level order.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Distinguishes the independent streams a single realization may consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamTag {
    Diagonal,
    OffDiagonal,
}

impl StreamTag {
    fn salt(self) -> u64 {
        match self {
            StreamTag::Diagonal => 0x6469_6167_6f6e_616c, // "diagonal"
            StreamTag::OffDiagonal => 0x6f66_6664_6961_676f, // "offdiago"
        }
    }
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for realization `realization` of stream `tag`.
pub fn substream_seed(base_seed: u64, realization: u64, tag: StreamTag) -> u64 {
    let h = splitmix64(base_seed);
    let h = splitmix64(h ^ realization.wrapping_mul(GOLDEN_GAMMA));
    splitmix64(h ^ tag.salt())
}

/// A reproducible single-consumer random stream.
#[derive(Debug, Clone)]
pub struct DisorderStream {
    inner: Xoshiro256PlusPlus,
}

impl DisorderStream {
    pub fn from_seed(seed: u64) -> Self {
        DisorderStream {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn for_realization(base_seed: u64, realization: u64, tag: StreamTag) -> Self {
        Self::from_seed(substream_seed(base_seed, realization, tag))
    }

    /// Uniform draw on `[0, 1)` with 53 bits of mantissa.
    pub fn unit(&mut self) -> f64 {
        unit_f64(&mut self.inner)
    }

    /// Uniform draw on `[-1/2, 1/2)`.
    pub fn centered(&mut self) -> f64 {
        centered_uniform(&mut self.inner)
    }
}

impl RngCore for DisorderStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

pub(crate) fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw on `[-1/2, 1/2)` from any generator.
pub fn centered_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    unit_f64(rng) - 0.5
}
