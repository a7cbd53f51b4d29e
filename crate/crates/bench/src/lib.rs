//! Shared fixtures for the criterion benchmarks.

use hjhalf_core::random::InstanceGenerator;
use hjhalf_core::PiecewiseLinear;

/// A reproducible batch of `(H, F)` pairs for limiter benchmarks.
pub fn limiter_pairs(seed: u64, count: usize) -> Vec<(PiecewiseLinear, PiecewiseLinear)> {
    let mut gen = InstanceGenerator::new(seed);
    (0..count).map(|_| (gen.coercive_hamiltonian(), gen.boundary_flux())).collect()
}

/// Initial nodes `-|sin x|` on `n` nodes of spacing `dx`.
pub fn wavy_state(n: usize, dx: f64) -> Vec<f64> {
    (0..n).map(|i| -(i as f64 * dx).sin().abs()).collect()
}
