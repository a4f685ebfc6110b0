//! Reproducible sample streams.
//!
//! Each stream is a ChaCha8 generator seeded through `ChaCha8Rng::seed_from_u64`.
//! Uniforms take the top 53 bits of a `u64` draw and sit at bin centres,
//! `((x >> 11) + 0.5) · 2⁻⁵³`, so they never hit 0 or 1. Normals come from the
//! Box-Muller transform, both outputs of a pair being used in order.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The splitmix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` within a batch seeded with `batch_seed`.
pub fn trial_seed(batch_seed: u64, index: u64) -> u64 {
    splitmix64(batch_seed ^ splitmix64(index))
}

pub struct SampleStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        SampleStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * self.uniform()).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// Circularly symmetric complex Gaussian with E|z|² = `variance`.
    pub fn cscg(&mut self, variance: f64) -> Complex64 {
        let s = (0.5 * variance).sqrt();
        let re = self.normal();
        let im = self.normal();
        Complex64::new(s * re, s * im)
    }

    /// A fair coin.
    pub fn bit(&mut self) -> bool {
        self.rng.next_u64() >> 63 == 1
    }
}
