//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ternflip_core::search::scramble;
use ternflip_core::{Format, Scheme};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn naive(m: usize, n: usize, p: usize) -> Scheme {
    Scheme::naive(Format::new(m, n, p).expect("valid format"))
}

/// A verified scheme `steps` random moves away from the naive one, so it
/// has plenty of flip candidates.
pub fn scrambled(m: usize, n: usize, p: usize, steps: usize, seed: u64) -> Scheme {
    scramble(&naive(m, n, p), steps, &mut rng(seed))
}

/// Formats the per-size benchmarks sweep over.
pub const SIZES: [(usize, usize, usize); 4] = [(2, 2, 2), (2, 3, 3), (3, 3, 3), (4, 4, 4)];
