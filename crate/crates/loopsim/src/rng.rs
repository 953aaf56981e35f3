//! Deterministic stream derivation.
//!
//! All randomness in a run flows from one master seed. Each consumer gets
//! its own ChaCha stream keyed by iteration, purpose and (where relevant)
//! user, so per-user work can run on any number of threads without
//! changing results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for. The discriminant is part of the
/// stream id, so streams for different purposes never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamKind {
    Split = 1,
    Fit = 2,
    Selection = 3,
    Noise = 4,
}

/// Derives independent RNG streams from a single master seed.
#[derive(Debug, Clone, Copy)]
pub struct RngFactory {
    master_seed: u64,
}

impl RngFactory {
    pub fn new(master_seed: u64) -> Self {
        RngFactory { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Stream for an iteration-wide purpose (split shuffles, model fitting).
    pub fn iteration_stream(&self, iteration: u32, kind: StreamKind) -> ChaCha8Rng {
        self.stream(iteration, kind, 0)
    }

    /// Stream for per-user work inside an iteration (selection draws, rating noise).
    pub fn user_stream(&self, iteration: u32, kind: StreamKind, user: usize) -> ChaCha8Rng {
        self.stream(iteration, kind, user)
    }

    fn stream(&self, iteration: u32, kind: StreamKind, user: usize) -> ChaCha8Rng {
        debug_assert!(user < (1 << 24), "user index exceeds stream encoding");
        let id = ((iteration as u64) << 32) | ((kind as u64) << 24) | user as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(id);
        rng
    }
}
