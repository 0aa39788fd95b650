//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a stream keyed by
//! `(seed, purpose, index)`. The key is expanded into a ChaCha8 state, so
//! streams are independent, order-free, and identical no matter how work is
//! scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags separating the crate's stream families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// One stream per oriented edge when sampling an environment.
    Edge,
    /// One stream per (resample id, vertex) for vertical derivatives.
    Resample,
    /// One stream per ensemble sample index.
    Sample,
    /// Bootstrap resampling inside estimators.
    Bootstrap,
    /// Plain Monte Carlo draws (moment reports and similar).
    Draw,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Edge => 0x45444745,     // "EDGE"
            Purpose::Resample => 0x52534d50, // "RSMP"
            Purpose::Sample => 0x534d504c,   // "SMPL"
            Purpose::Bootstrap => 0x424f4f54,
            Purpose::Draw => 0x44524157,
        }
    }
}

/// SplitMix64 finalizer; used only to spread key material, never as the
/// output generator.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The stream for `(seed, purpose, index)`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = mix(seed ^ mix(purpose.tag()));
    state = mix(state ^ mix(index));
    for chunk in key.chunks_exact_mut(8) {
        state = mix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Derive a child seed, e.g. the per-sample seed of an ensemble member.
pub fn child_seed(seed: u64, purpose: Purpose, index: u64) -> u64 {
    mix(mix(seed ^ mix(purpose.tag())) ^ mix(index))
}

/// Uniform draw in the open interval (0,1); never returns 0 or 1, so
/// quantile transforms stay finite.
pub fn open_unit(rng: &mut impl rand::Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}
