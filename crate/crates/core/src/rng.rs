//! Seeded random streams.
//!
//! Every agent owns a ChaCha8 stream keyed by the master seed and selected by
//! the agent id, so creating or removing one agent never shifts the draws of
//! any other. World-level processes (influx, boost placement, lesion seeding)
//! use reserved stream ids at the top of the id space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Reserved stream ids for world-level processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum WorldStream {
    Influx = u64::MAX,
    Boost = u64::MAX - 1,
    Seeding = u64::MAX - 2,
    Therapy = u64::MAX - 3,
}

fn key_from_seed(seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    let mut z = seed;
    for chunk in key.chunks_exact_mut(8) {
        z = splitmix64(z);
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    key
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut x = z;
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stream for the agent with the given id.
pub fn agent_stream(master_seed: u64, agent_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::from_seed(key_from_seed(master_seed));
    rng.set_stream(agent_id);
    rng
}

pub fn world_stream(master_seed: u64, which: WorldStream) -> StreamRng {
    agent_stream(master_seed, which as u64)
}

/// Bernoulli draw that is exactly `false` for `p <= 0` and `true` for `p >= 1`.
#[inline]
pub fn chance<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.random::<f64>() < p
    }
}

/// Integer part plus a Bernoulli draw on the fractional part.
pub fn stochastic_round<R: Rng + ?Sized>(rng: &mut R, x: f64) -> u64 {
    if x <= 0.0 || !x.is_finite() {
        return 0;
    }
    let base = x.floor();
    let frac = x - base;
    base as u64 + u64::from(chance(rng, frac))
}

/// Per-step probability of an event with exponential waiting time `mean`
/// over a step of length `dt` (same units).
#[inline]
pub fn per_step_probability(dt: f64, mean: f64) -> f64 {
    if mean <= 0.0 {
        1.0
    } else {
        -(-dt / mean).exp_m1()
    }
}
