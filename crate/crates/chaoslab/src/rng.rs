//! Keyed random streams.
//!
//! A [`StreamKey`] concatenates (master seed, module tag, replica, level)
//! into the 32-byte ChaCha seed, so distinct keys give distinct generators
//! by construction and no two workers ever share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

/// Which consumer a stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u64)]
pub enum Tag {
    StarField = 1,
    Circle = 2,
    Brw = 3,
    Root = 4,
    Spine = 5,
    Oracle = 6,
    Meander = 7,
    Kahane = 8,
    StarEquation = 9,
    Thick = 10,
    Shift = 11,
    Mollify = 12,
    Aux = 13,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub tag: Tag,
    pub replica: u64,
    pub level: u64,
}

impl StreamKey {
    pub fn new(seed: u64, tag: Tag, replica: u64) -> Self {
        StreamKey { seed, tag, replica, level: 0 }
    }

    pub fn with_level(self, level: u64) -> Self {
        StreamKey { level, ..self }
    }

    pub fn with_tag(self, tag: Tag) -> Self {
        StreamKey { tag, ..self }
    }

    /// The raw seed bytes; injective in all four components.
    pub fn bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        out[..8].copy_from_slice(&self.seed.to_le_bytes());
        out[8..16].copy_from_slice(&(self.tag as u64).to_le_bytes());
        out[16..24].copy_from_slice(&self.replica.to_le_bytes());
        out[24..].copy_from_slice(&self.level.to_le_bytes());
        out
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::from_seed(self.bytes())
    }
}

/// Key for replica `replica` of module `tag` under `seed`.
pub fn derive_stream(seed: u64, tag: Tag, replica: u64) -> StreamKey {
    StreamKey::new(seed, tag, replica)
}
