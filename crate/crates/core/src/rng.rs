//! Seeded, splittable random streams.
//!
//! Every draw `i` of a batch gets its own ChaCha stream `(seed, i)`, so batch
//! results do not depend on how rayon schedules the work or on the thread
//! count. Reductions always run over the index-ordered results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type StreamRng = ChaCha8Rng;

/// Independent stream for draw `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `draw` once per index in parallel and returns results in index order.
pub fn par_draws<T, F>(seed: u64, count: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, u64) -> T + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            draw(&mut rng, i)
        })
        .collect()
}
