//! Seed derivation.
//!
//! Every source of randomness in the crate is keyed off a single master seed
//! split into per-stream sub-seeds with SplitMix64:
//!
//! `stream_seed(master, stream) = splitmix64(master ^ splitmix64(stream))`
//!
//! Per-item seeds (one per image, say) are `indexed_seed(stream_seed, i) =
//! splitmix64(stream_seed ^ splitmix64(i))`. The streams are fixed constants
//! so adding a new consumer never shifts existing ones.

/// Stream id for the stratified train/test split.
pub const STREAM_SPLIT: u64 = 0x5354_4c49;
/// Stream id for per-image Gaussian noise.
pub const STREAM_NOISE: u64 = 0x4e4f_4953;
/// Stream id for synthetic data sampling.
pub const STREAM_SAMPLING: u64 = 0x5341_4d50;

/// SplitMix64 finalizer (Steele et al.), a bijection on u64.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for a named stream.
pub fn stream_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

/// Per-item seed within a stream.
pub fn indexed_seed(stream: u64, index: u64) -> u64 {
    splitmix64(stream ^ splitmix64(index))
}
