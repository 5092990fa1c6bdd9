//! Reproducible random streams keyed by (seed, repetition, purpose, index).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for; part of the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Tls = 1,
    Gaussian = 2,
    Outcome = 3,
    Modulation = 4,
    Static = 5,
    FrequencyPath = 6,
}

/// Independent ChaCha8 stream. Repetitions must be < 2³² and indices < 2²⁴.
pub fn stream(seed: u64, repetition: u64, purpose: Purpose, index: u32) -> ChaCha8Rng {
    debug_assert!(repetition < 1 << 32 && index < 1 << 24);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((repetition << 32) | ((purpose as u64) << 24) | index as u64);
    rng
}
