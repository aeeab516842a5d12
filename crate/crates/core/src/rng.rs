//! Deterministic counter-based random streams.
//!
//! A stream is identified by `(seed, stream_id)`; within it, output is a pure
//! function of the ChaCha block counter, so independent workers can each own
//! a stream without sharing state.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { inner }
    }

    pub fn stream_id(&self) -> u64 {
        self.inner.get_stream()
    }

    /// Position (in 32-bit words) within the stream.
    pub fn word_pos(&self) -> u128 {
        self.inner.get_word_pos()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
