//! Deterministic random streams.
//!
//! A stream is a ChaCha8 generator keyed by `seed_from_u64(seed)` with the
//! ChaCha stream counter set to `stream_id`. Distinct stream ids on the same
//! seed give non-overlapping keystreams. Experiment cells derive their stream
//! id from a path of indices with [`RngStream::derive`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Identifies the Gaussian generator used by every sampler in this build.
pub const GAUSSIAN_METHOD: &str = "ziggurat/rand_distr-0.5/chacha8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Stream for a position in an experiment, e.g. `[cell, repetition]`.
    /// The id depends only on `(seed, path)`, never on scheduling.
    pub fn derive(seed: u64, path: &[u64]) -> Self {
        let stream_id = path.iter().fold(splitmix64(path.len() as u64), |acc, &p| splitmix64(acc ^ splitmix64(p)));
        RngStream { seed, stream_id }
    }

    /// A child stream of this one.
    pub fn child(&self, index: u64) -> Self {
        RngStream::derive(self.seed, &[self.stream_id, index])
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
