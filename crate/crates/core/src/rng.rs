//! Seeded random streams.
//!
//! Every sampled object (a fidelity pair, a state, a training run) gets its own
//! ChaCha8 stream selected by `(seed, stream)`, so results do not depend on
//! how work is scheduled across threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `count` angles uniform on `[0, 2π)`.
pub fn uniform_angles<T: Scalar, R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<T> {
    (0..count)
        .map(|_| T::lit(rng.gen::<f64>() * TAU))
        .collect()
}

/// `count` values uniform on `[lo, hi)`.
pub fn uniform_in<T: Scalar, R: Rng + ?Sized>(rng: &mut R, count: usize, lo: f64, hi: f64) -> Vec<T> {
    (0..count)
        .map(|_| T::lit(lo + (hi - lo) * rng.gen::<f64>()))
        .collect()
}
