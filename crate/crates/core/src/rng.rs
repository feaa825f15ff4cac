//! Deterministic random number generation.
//!
//! Every stochastic routine in this crate derives its generator from a
//! `(seed, stream)` pair: ChaCha12 keyed by the seed, with the 64-bit stream
//! id selecting an independent substream. Parallel replications assign one
//! stream per replication index, so results are bit-identical for any worker
//! count.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Generator for substream `stream` of the master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on the open interval (0, 1).
///
/// Uses the top 53 bits of one u64 and offsets by half an ulp so that 0 and 1
/// are never returned; safe to feed into inverse CDFs with infinite tails.
pub fn unit_open(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Standard normal draw via inverse CDF.
pub fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
    crate::special::normal_quantile(unit_open(rng))
}
