//! Named random substreams derived from one master seed.
//!
//! Every stochastic ingredient of a run draws from its own ChaCha8 stream, so
//! switching the selection rule (merit vs. random) leaves the population
//! realization untouched. Instantaneous scores are keyed by
//! `(participant, epoch)` rather than drawn sequentially: a participant's score
//! in a given epoch is the same number whichever rule put it in the active set.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::types::ParticipantId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Medians = 1,
    Lifetimes = 2,
    Growth = 3,
    Selection = 4,
    Baseline = 5,
    Scores = 6,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStreams {
    master: u64,
}

impl SeedStreams {
    pub fn new(master: u64) -> Self {
        SeedStreams { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn stream(&self, which: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(self.master));
        rng.set_stream(which as u64);
        rng
    }

    /// Generator for the instantaneous score of `id` in `epoch`.
    pub fn score_rng(&self, id: ParticipantId, epoch: u64) -> ChaCha8Rng {
        let key = mix64(self.master ^ mix64(Stream::Scores as u64));
        let key = mix64(key ^ mix64(id.0));
        let key = mix64(key ^ epoch);
        ChaCha8Rng::seed_from_u64(key)
    }
}
