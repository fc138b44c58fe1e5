//! Seed derivation for reproducible parallel runs.
//!
//! Every random draw comes from a ChaCha stream keyed by the master seed. The
//! 64-bit stream id encodes what the stream is used for (top byte) and an
//! index (low 56 bits), so a trial's randomness depends only on
//! `(master_seed, domain, index)` and never on scheduling.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::numerics::CVec2;

pub type SimRng = ChaCha12Rng;

const INDEX_BITS: u32 = 56;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Domain {
    /// Channel and estimation noise of one Monte Carlo trial.
    Trial = 1,
    /// Codebooks of one codebook realization (RVQ mode).
    Codebook = 2,
    /// Samples of the quantization-bound checks.
    Bounds = 3,
}

pub fn stream_rng(master_seed: u64, domain: Domain, index: u64) -> SimRng {
    debug_assert!(index < (1 << INDEX_BITS));
    let mut rng = SimRng::seed_from_u64(master_seed);
    rng.set_stream(((domain as u64) << INDEX_BITS) | (index & ((1 << INDEX_BITS) - 1)));
    rng
}

/// One draw from CN(0, 1): real and imaginary parts each N(0, 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// CN(0, I₂).
pub fn complex_normal_vec<R: Rng + ?Sized>(rng: &mut R) -> CVec2 {
    let a = complex_normal(rng);
    let b = complex_normal(rng);
    CVec2::new(a, b)
}
