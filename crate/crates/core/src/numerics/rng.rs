use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A seeded, stream-addressable random source.
///
/// Identical `(seed, stream)` pairs and call sequences give bit-identical
/// draws. [`RngStream::fork`] derives child streams from labels without
/// advancing the parent, so per-particle and per-dimension draws do not
/// depend on scheduling order.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent child stream keyed by `label`; the parent is untouched.
    pub fn fork(&self, label: u64) -> RngStream {
        let key = splitmix64(self.seed ^ splitmix64(self.stream.wrapping_add(0x5851_F42D_4C95_7F2D)));
        RngStream::new(key, label)
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.rng);
    }
}

/// Draw from `N(mean, variance)`; a zero variance returns `mean` exactly.
pub fn sample_normal(rng: &mut RngStream, mean: f64, variance: f64) -> Result<f64> {
    if variance < 0.0 || variance.is_nan() {
        return Err(Error::NegativeVariance(variance));
    }
    if variance == 0.0 {
        return Ok(mean);
    }
    Ok(mean + variance.sqrt() * rng.standard_normal())
}

/// Draw from `N(mean, radius²·I)`.
pub fn sample_mvn_isotropic(rng: &mut RngStream, mean: &[f64], radius: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0) {
        return Err(Error::NonPositiveRadius(radius));
    }
    Ok(mean.iter().map(|m| m + radius * rng.standard_normal()).collect())
}
