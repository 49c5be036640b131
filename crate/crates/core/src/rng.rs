//! Random streams keyed by `(seed, index)`.
//!
//! Each sample index gets its own ChaCha stream, so a sample does not depend
//! on which worker draws it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
