//! Fixtures shared by the benchmarks.

use qgraph::random::random_bounded_scatterer;
use qgraph::ScatteringMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two scatterers with `k` slots per side and internal dimension `d`.
/// Reflections are capped at 0.9 so the geometric series converges.
pub fn homogeneous_pair(k: usize, d: usize, seed: u64) -> (ScatteringMatrix, ScatteringMatrix) {
    let mut r = rng(seed);
    (random_bounded_scatterer(&mut r, k, d, 0.9), random_bounded_scatterer(&mut r, k, d, 0.9))
}
