//! Named hamiltonians and boundary functions.

use crate::error::{Error, Result};
use crate::pwl::PiecewiseLinear;

/// Every preset name accepted by [`preset`].
pub const NAMES: &[&str] = &["W", "V", "linear", "asymF", "kinkF", "steepF", "wideF", "staircaseF"];

/// Boundary functions that are strictly decreasing and tend to `-inf` on
/// the right, as required by the coupling test function.
pub const ADMISSIBLE_FLUXES: &[&str] = &["linear", "asymF", "kinkF", "steepF", "wideF"];

fn pl(points: &[(f64, f64)], left: f64, right: f64) -> PiecewiseLinear {
    PiecewiseLinear::new(points.to_vec(), left, right).expect("preset table is well formed")
}

/// Looks up a preset by name.
///
/// - `W`: two-well hamiltonian with minima at `-1` and `1`, maximum `1` at `0`.
/// - `V`: `|p|`.
/// - `linear`: `-p`.
/// - `asymF`, `kinkF`: asymmetric strictly decreasing fluxes.
/// - `steepF`, `wideF`: strictly decreasing fluxes with very different tails.
/// - `staircaseF`: non-increasing with flat steps.
pub fn preset(name: &str) -> Result<PiecewiseLinear> {
    Ok(match name {
        "W" => pl(&[(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)], -1.0, 1.0),
        "V" => pl(&[(0.0, 0.0)], -1.0, 1.0),
        "linear" => PiecewiseLinear::affine(-1.0, 0.0),
        "asymF" => pl(&[(-1.0, 2.0), (0.0, 0.0), (2.0, -1.0)], -3.0, -0.25),
        "kinkF" => pl(&[(-2.0, 1.0), (0.0, 0.0), (1.0, -3.0)], -0.5, -1.0),
        "steepF" => pl(&[(-1.0, 1.0), (1.0, -1.0)], -10.0, -10.0),
        "wideF" => pl(&[(0.0, 0.0)], -20.0, -0.1),
        "staircaseF" => pl(&[(-3.0, 4.0), (-2.0, 2.0), (-1.0, 2.0), (1.0, -1.0), (2.0, -1.0), (3.0, -3.0)], -2.0, -2.0),
        _ => {
            return Err(Error::UnknownPreset { name: name.to_string(), available: NAMES.join(", ") });
        }
    })
}
