//! Effective boundary conditions for one-dimensional Hamilton-Jacobi
//! equations `u_t + H(u_x) = 0` posed on the half-line `x > 0`.
//!
//! The crate is organised bottom-up:
//!
//! - [`pwl`]: exact algebra on continuous piecewise-linear functions, the
//!   representation of every hamiltonian and boundary flux.
//! - [`limiter`]: slope bounds `p-`/`p+`, set limiters, limited flux
//!   functions and the classification `F -> F_{A_F}` of a general
//!   non-increasing boundary function.
//! - [`oracle`]: a brute-force grid evaluation of the limiter definitions,
//!   kept independent of [`limiter`] to cross-check it.
//! - [`testfn`]: numerical construction and a-posteriori verification of
//!   the coupling time-space test function `phi(t,x) = f(t) + g(x) + x E(t)`.
//! - [`solver`]: a monotone Lax-Friedrichs scheme on a truncated half-line
//!   used for plane-wave, ordering and classification-convergence checks.
//! - [`presets`] and [`random`]: named functions and seeded random instances.

pub mod error;
pub mod limiter;
pub mod oracle;
pub mod presets;
pub mod pwl;
pub mod random;
pub mod solver;
pub mod testfn;

pub use error::{Error, Result};
pub use limiter::{EffectiveFlux, LimiterPoint, SetLimiter, SlopeBounds, ValidationReport};
pub use pwl::{crossings, PiecewiseLinear};
