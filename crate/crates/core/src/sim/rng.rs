//! Reproducible random streams.
//!
//! Every replication draws from its own ChaCha8 stream. The 256-bit key is
//! expanded from the master seed and the 64-bit stream id is the
//! replication index, so replication `i` sees the same numbers whichever
//! thread runs it and in whatever order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for replication `rep` under `master_seed`.
pub fn replication_rng(master_seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep);
    rng
}
