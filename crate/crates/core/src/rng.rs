//! Seed plumbing.
//!
//! Every random stream in a run is a ChaCha generator seeded from the run seed
//! plus a stream tag and an index, so that e.g. user 3's fading is the same
//! whether the run has 4 or 32 users.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type SimRng = ChaCha12Rng;

/// Stream tags used by the simulator.
pub mod stream {
    pub const RAYLEIGH: u64 = 1;
    pub const BEAMS: u64 = 2;
    pub const MULTIPATH: u64 = 3;
    pub const SHADOWING: u64 = 4;
    pub const PLACEMENT: u64 = 5;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed for `(stream, index)` from a base seed.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index)
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
