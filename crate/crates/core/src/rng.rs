//! Seeded randomness.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). A 64-bit
//! seed is expanded with `SeedableRng::seed_from_u64`, then each
//! independent sub-step draws from its own ChaCha stream id (see
//! [`Stream`]). Changing how many numbers one step consumes therefore never
//! shifts the numbers seen by another step.
//!
//! Per-task seeds (benchmark cells, runs, forest trees) are derived from a
//! master seed with [`derive_seed`], a SplitMix64 chain over the key path,
//! so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// ChaCha stream ids for independent sub-steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Graph = 1,
    Signals = 2,
    HubSelection = 3,
    Noise = 4,
    SolverInit = 5,
    Community = 6,
    Forest = 7,
    Centrality = 8,
    Sampling = 9,
}

pub fn stream_rng(seed: u64, stream: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a key path.
pub fn derive_seed(master: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(master), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}
