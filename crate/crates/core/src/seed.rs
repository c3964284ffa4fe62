//! Counter-based seed derivation.
//!
//! Every random stream in the library is keyed by a `u64` seed. Streams that
//! belong to one run (trial `r`, sampler `s`, feature count `M`, ...) are
//! derived from the master seed by hashing the stream coordinates, never by
//! drawing from a shared generator, so results do not depend on the order in
//! which parallel work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of stream coordinates into `master`.
pub fn derive_seed(master: u64, stream: &[u64]) -> u64 {
    stream
        .iter()
        .fold(mix64(master), |h, &k| mix64(h ^ mix64(k.wrapping_add(GOLDEN))))
}

/// Seed of trial `r` under `master`.
pub fn trial_seed(master: u64, r: u64) -> u64 {
    derive_seed(master, &[r])
}

/// Deterministic generator for a derived seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable numeric tag for a string label, used as a stream coordinate.
pub fn label(s: &str) -> u64 {
    // FNV-1a
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
