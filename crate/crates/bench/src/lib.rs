//! Shared inputs for the criterion benchmarks.

use particlegp_core::numerics::RngStream;
use particlegp_core::objectives::Objective;
use particlegp_core::particle_gp::ParticleCloud;

/// Cloud of `n` particles around `center` with observed gradients.
pub fn cloud(obj: &mut Objective, center: &[f64], n: usize, radius: f64, seed: u64) -> ParticleCloud {
    let mut rng = RngStream::new(seed, 0);
    let positions = (0..n)
        .map(|_| center.iter().map(|c| c + radius * rng.standard_normal()).collect())
        .collect();
    ParticleCloud::observe(positions, radius, obj)
}
