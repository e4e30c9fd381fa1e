//! Counter-based seed derivation. Every random stream in the crate is keyed
//! by a master seed plus a tuple of integer tags, so results never depend on
//! evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `tags` into `base`, producing a well-mixed child seed.
pub fn derive(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix(base), |acc, &t| splitmix(acc ^ splitmix(t)))
}

/// Generator for stream `stream` under seed `base`.
pub fn stream(base: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(stream);
    rng
}

/// Generator for a derived seed; shorthand for `stream(derive(base, tags), 0)`.
pub fn rng_for(base: u64, tags: &[u64]) -> Rng {
    stream(derive(base, tags), 0)
}
