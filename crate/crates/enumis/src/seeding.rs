//! Counter-based seed derivation.
//!
//! Campaigns derive one seed per (instance, run, trial) from a master seed
//! so that jobs can be dispatched in any order while every job stays
//! individually reproducible. The scheme is `splitmix64` applied to the
//! master seed offset by a fixed odd constant per counter step, the same
//! construction SplitMix64 itself uses for stream splitting.

/// SplitMix64 finalizer. Bijective on `u64`.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th job of the stream rooted at `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}
