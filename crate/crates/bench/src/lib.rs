//! Deterministic inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` integers drawn from `0..distinct`, as reals; small `distinct` gives
/// large groups.
pub fn tied_column(n: usize, distinct: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0..distinct) as f64).collect()
}

/// `n` continuous values; with overwhelming probability all distinct.
pub fn continuous_column(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
