// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded randomness.
//!
//! All sampling goes through [`ChaCha8Rng`] seeded with `seed_from_u64`, so a
//! seed fixes the stream across platforms and runs. Ensembles derive
//! per-sample seeds with [`split_seed`], a SplitMix64-style mix of
//! `(seed, stream, index)`; samples can then run in any order or in
//! parallel and still reproduce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::c64;

pub type SampleRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sample `index` of stream `stream` (e.g. a sweep grid point).
pub fn split_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let a = mix64(seed.wrapping_add(GOLDEN_GAMMA));
    let b = mix64(a ^ stream.wrapping_mul(GOLDEN_GAMMA).wrapping_add(1));
    mix64(b ^ index.wrapping_mul(GOLDEN_GAMMA).wrapping_add(2))
}

/// Uniform sample from the open complex disk `|z| < radius`, by rejection
/// from the bounding square.
pub fn uniform_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> c64 {
    loop {
        let x: f64 = rng.random_range(-1.0..1.0);
        let y: f64 = rng.random_range(-1.0..1.0);
        if x * x + y * y < 1.0 {
            return c64::new(radius * x, radius * y);
        }
    }
}

/// Uniform sample from the open interval `(-radius, radius)`.
pub fn uniform_symmetric<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> f64 {
    loop {
        let x: f64 = rng.random_range(-1.0..1.0);
        if x > -1.0 {
            return radius * x;
        }
    }
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
