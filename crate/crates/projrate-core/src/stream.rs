//! Seed and stream discipline.
//!
//! Every randomized routine takes an explicit generator; nothing in the crate
//! owns hidden RNG state. Reproducibility contract: a master seed plus a
//! stream index fully determine a generator, and all consumers document which
//! stream they draw from.
//!
//! Stream layout:
//! - stream 0: frame sampling (the quenched projection is drawn once per
//!   seed and reused across all samples),
//! - streams 1..=W: Monte Carlo workers (worker w uses stream 1 + w),
//! - streams >= 256: auxiliary draws in diagnostics (direction sets, etc.).

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream reserved for drawing the projection frame.
pub const FRAME_STREAM: u64 = 0;
/// First stream handed to Monte Carlo workers; worker `w` gets `WORKER_STREAM0 + w`.
pub const WORKER_STREAM0: u64 = 1;
/// First stream for auxiliary diagnostic draws.
pub const AUX_STREAM0: u64 = 256;

/// The crate-wide generator: ChaCha with 12 rounds, keyed by the master seed,
/// with the stream counter selecting independent substreams.
pub type Stream = ChaCha12Rng;

/// Build the generator for (seed, stream).
pub fn seeded(seed: u64, stream: u64) -> Stream {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
