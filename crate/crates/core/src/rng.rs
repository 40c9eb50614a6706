//! Reproducible random streams.
//!
//! Every random choice in the crate draws from ChaCha8 (`rand_chacha`), keyed
//! by a 64-bit master seed through `SeedableRng::seed_from_u64` and split into
//! independent streams with `set_stream`. A run identified by
//! `(master, stream)` therefore sees the same choices on every platform and
//! under any parallel schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64) -> Self {
        Self { master, stream: 0 }
    }

    /// The seed for run `index` under the same master seed.
    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn rng(self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for Seed {
    fn from(master: u64) -> Self {
        Self::new(master)
    }
}
