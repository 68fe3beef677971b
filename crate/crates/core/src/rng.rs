//! Seeded random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] keyed by a root
//! seed and a named stream. Streams are independent ChaCha stream ids, so the
//! draws of one component never shift when another component changes how
//! much randomness it consumes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named purposes for random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Synth = 1,
    Profile = 2,
    Init = 3,
    Shuffle = 4,
    Ga = 5,
    GaEval = 6,
    GradCheck = 7,
}

/// RNG for `(root, stream, a, b)`. `a` and `b` are caller-chosen indices
/// (subject, session, generation, genome index ...), each below 2^24.
pub fn stream_rng(root: u64, stream: Stream, a: u64, b: u64) -> ChaCha8Rng {
    debug_assert!(a < (1 << 24) && b < (1 << 24));
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(((stream as u64) << 48) | ((a & 0xFF_FFFF) << 24) | (b & 0xFF_FFFF));
    rng
}

/// Derive a child seed from a stream; used where an API takes a plain `u64` seed.
pub fn derive_seed(root: u64, stream: Stream, a: u64, b: u64) -> u64 {
    use rand::RngCore;
    stream_rng(root, stream, a, b).next_u64()
}
