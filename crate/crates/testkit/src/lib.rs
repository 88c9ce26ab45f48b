//! Seeded generators and brute-force oracles shared by the test suites.

pub mod closure;
pub mod iso;
pub mod module;
pub mod sssom;
pub mod turtle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand::Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
