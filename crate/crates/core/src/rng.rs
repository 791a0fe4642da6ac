// SPDX-License-Identifier: Apache-2.0

//! Reproducible random streams: `(seed, stream)` fully determines every draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SgtRng = ChaCha8Rng;

/// Independent generator for replication `stream` under base `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SgtRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
