//! Explicit counter-based random number streams.
//!
//! Every randomized operation takes a [`Stream`] (or a seed it derives one
//! from) as an argument; there is no global generator. Independent work units
//! (rows of a simulated dataset, Gibbs chains, replicates, bootstrap
//! resamples) each get a child stream derived from the root seed and a path
//! of integer tags, so results do not depend on evaluation order or thread
//! count, and extending a study reuses the streams of the existing units.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The concrete generator used throughout: a counter-mode stream cipher.
pub type Stream = ChaCha12Rng;

/// Creates the root stream for a run.
pub fn root(seed: u64) -> Stream {
    Stream::seed_from_u64(mix(seed, 0x9e37_79b9_7f4a_7c15))
}

/// Derives an independent child stream from `seed` and a tag path.
///
/// The path encodes the unit's coordinates, e.g. `&[REPLICATE, r]` or
/// `&[GIBBS, i, em_iter]`. Distinct paths give statistically independent
/// streams; the same path always gives the same stream.
pub fn derive(seed: u64, path: &[u64]) -> Stream {
    let mut state = mix(seed, 0x6a09_e667_f3bc_c909);
    for &tag in path {
        state = mix(state, tag);
    }
    Stream::seed_from_u64(state)
}

// Tag namespaces for derived streams. Keeping them distinct guards against
// accidental stream collisions between subsystems.
pub const TAG_PRECISION: u64 = 1;
pub const TAG_ROW: u64 = 2;
pub const TAG_CONTAMINATE: u64 = 3;
pub const TAG_GIBBS: u64 = 4;
pub const TAG_REPLICATE: u64 = 5;
pub const TAG_BOOTSTRAP: u64 = 6;
pub const TAG_CONDCORR: u64 = 7;
pub const TAG_JITTER: u64 = 8;

/// SplitMix64 finalizer over the running state xor the tag.
fn mix(state: u64, tag: u64) -> u64 {
    let mut z = state ^ tag.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;

    #[test]
    fn derived_streams_are_reproducible_and_distinct() {
        let mut a = derive(7, &[TAG_ROW, 3]);
        let mut b = derive(7, &[TAG_ROW, 3]);
        let mut c = derive(7, &[TAG_ROW, 4]);
        let xa = a.next_u64();
        assert_eq!(xa, b.next_u64());
        assert_ne!(xa, c.next_u64());
    }

    #[test]
    fn path_order_matters() {
        let mut a = derive(1, &[2, 3]);
        let mut b = derive(1, &[3, 2]);
        assert_ne!(a.next_u64(), b.next_u64());
    }
}
