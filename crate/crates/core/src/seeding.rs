//! Deterministic RNG substreams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a root seed and a
//! stream id, so the `i`-th sample of a computation sees the same numbers no matter which
//! worker evaluates it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream namespaces, one per consumer.
#[derive(Clone, Copy, Debug)]
#[repr(u64)]
pub enum Purpose {
    FidelityPairs = 1,
    Entanglement = 2,
    Sweep = 3,
    Split = 4,
    Init = 5,
    Batches = 6,
    Subsample = 7,
    Restart = 8,
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 48) ^ index);
    rng
}

/// Mix a root seed with a component label into a new root seed (splitmix64 finalizer).
pub fn derive(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
