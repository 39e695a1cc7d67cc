//! Seeded random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream whose seed is
//! derived from a user seed and a stream index, so column `j` of a sample
//! matrix is the same no matter which thread produced it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

/// `n` independent standard normal draws from one stream.
pub fn gaussian_vec(seed: u64, stream_id: u64, n: usize) -> Vec<f64> {
    let mut rng = stream(seed, stream_id);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// A Gaussian vector scaled to unit length.
pub fn unit_vec(seed: u64, stream_id: u64, n: usize) -> Vec<f64> {
    let mut v = gaussian_vec(seed, stream_id, n);
    let nrm = crate::dense::norm2(&v);
    if nrm > 0.0 {
        crate::dense::scale(1.0 / nrm, &mut v);
    }
    v
}
