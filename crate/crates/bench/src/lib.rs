//! Shared inputs for the benchmarks.

use hbent::TruthTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` uniformly random truth tables in `n` variables, fixed by `seed`.
pub fn random_tables(n: usize, count: usize, seed: u64) -> Vec<TruthTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| TruthTable::from_fn(n, |_| rng.gen()))
        .collect()
}
