//! Deterministic replication streams.
//!
//! Every replication draws from its own ChaCha8 stream addressed by
//! `(seed, replication index)`, so results are independent of execution order
//! and thread count, and any single replication can be reproduced in
//! isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for replication `rep` of an experiment seeded with `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    phase_rng(seed, 0, rep)
}

/// Stream for phase `phase`, replication `rep`. Distinct phases of one
/// experiment (data generation, limit simulation, ...) get disjoint streams.
pub fn phase_rng(seed: u64, phase: u32, rep: u64) -> ChaCha8Rng {
    assert!(rep < 1 << 48, "replication index exceeds the stream space");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((phase as u64) << 48) | rep);
    rng
}
