//! Seed handling.
//!
//! Every stochastic routine takes an explicit `u64` seed. Sub-tasks (grid
//! cells, folds, trees) get their own seed from [`derive_seed`], a SplitMix64
//! hash of `(master, stream, index)`, so results do not depend on the order
//! or thread that runs a task.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for task `index` of stream `stream` under `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)
}

/// Named streams so that unrelated consumers of one master seed never collide.
pub mod stream {
    pub const SPLIT: u64 = 1;
    pub const RESAMPLE: u64 = 2;
    pub const FOLDS: u64 = 3;
    pub const GRID_CELL: u64 = 4;
    pub const FOLD_FIT: u64 = 5;
    pub const FINAL_FIT: u64 = 6;
    pub const SELECTOR: u64 = 7;
    pub const TREE: u64 = 8;
}
