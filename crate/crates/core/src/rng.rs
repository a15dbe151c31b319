//! Seeded, splittable random streams and round sharding.
//!
//! Every Monte Carlo loop splits its rounds into fixed-size shards. Shard `k`
//! draws from ChaCha stream `k` of the run seed, so results depend only on the
//! seed and the round count, never on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type SimRng = ChaCha8Rng;

pub const SHARD_ROUNDS: u64 = 1 << 14;

pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `work(shard_rounds, rng)` for each shard in parallel and returns the
/// per-shard results in shard order.
pub fn sharded<T, F>(rounds: u64, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> T + Sync,
{
    let shards = rounds.div_ceil(SHARD_ROUNDS);
    (0..shards)
        .into_par_iter()
        .map(|k| {
            let n = SHARD_ROUNDS.min(rounds - k * SHARD_ROUNDS);
            let mut rng = stream_rng(seed, k);
            work(n, &mut rng)
        })
        .collect()
}
