//! Explicit monotone scheme for `u_t + H(u_x) = 0` on `x > 0` with the
//! boundary condition `u_t + F(u_x) = 0` at `x = 0`.
//!
//! Interior nodes use the Lax-Friedrichs numerical hamiltonian
//! `H((a + b) / 2) - sigma / 2 (b - a)` on the backward and forward
//! differences; the boundary node applies `F` to the forward difference. With
//! `sigma` bounding the slopes of both `H` and `F` and
//! `dt <= dx / sigma`, one step is non-decreasing in every node value, which
//! gives the discrete comparison principle checked by [`check_ordering`].
//!
//! The half-line is truncated at `x = L`. By default the last node sees a
//! ghost neighbour continuing the initial slope, which keeps the update
//! monotone; the domain is sized so that `sigma T < L / 2` and the left half
//! never feels the cut.

use crate::error::{Error, Result};
use crate::limiter::effective_flux;
use crate::pwl::PiecewiseLinear;

/// `H((a + b) / 2) - sigma / 2 (b - a)`.
pub fn numerical_hamiltonian(p_left: f64, p_right: f64, h: &PiecewiseLinear, sigma: f64) -> f64 {
    h.eval(0.5 * (p_left + p_right)) - 0.5 * sigma * (p_right - p_left)
}

/// Update of the last node of the truncated domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RightBoundary {
    /// Ghost neighbour continuing the initial data with its last slope.
    InitialSlope,
    /// Ghost neighbour at a fixed slope.
    GhostSlope(f64),
    /// `u_n - dt H(backward difference)`; not monotone where `H' < 0`.
    OneSided,
}

/// Numerical parameters of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub dx: f64,
    pub t_final: f64,
    pub cfl: f64,
    /// Dissipation; defaults to the largest slope of `H` and `F`.
    pub sigma: Option<f64>,
    /// Domain length; defaults to the smallest multiple of `dx` above
    /// `2.5 sigma T`.
    pub length: Option<f64>,
    pub right: RightBoundary,
    /// Number of stored snapshots after the initial one.
    pub snapshots: usize,
    /// Refuse steps above the monotonicity bound `dx / sigma`.
    pub enforce_cfl: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            dx: 1.0 / 64.0,
            t_final: 1.0,
            cfl: 0.4,
            sigma: None,
            length: None,
            right: RightBoundary::InitialSlope,
            snapshots: 10,
            enforce_cfl: true,
        }
    }
}

/// Default dissipation: the global Lipschitz constant of `H` and `F`.
pub fn default_sigma(h: &PiecewiseLinear, f_bc: &PiecewiseLinear) -> f64 {
    h.lipschitz().max(f_bc.lipschitz()).max(f64::MIN_POSITIVE)
}

/// One explicit step of the scheme on a fixed grid.
#[derive(Clone, Debug)]
pub struct Scheme {
    h: PiecewiseLinear,
    f_bc: PiecewiseLinear,
    pub dx: f64,
    pub dt: f64,
    pub sigma: f64,
    ghost_slope: Option<f64>,
}

impl Scheme {
    /// Fails with `CflViolation` if `dt > dx / sigma` or `sigma` is below
    /// the slopes of `H` or `F`.
    pub fn new(h: &PiecewiseLinear, f_bc: &PiecewiseLinear, dx: f64, dt: f64, sigma: f64, ghost_slope: Option<f64>) -> Result<Self> {
        let bound = dx / sigma;
        if dt > bound * (1.0 + 1e-12) || sigma < default_sigma(h, f_bc) * (1.0 - 1e-12) {
            return Err(Error::CflViolation { dt, bound: dx / default_sigma(h, f_bc).max(sigma) });
        }
        Ok(Self::new_unchecked(h, f_bc, dx, dt, sigma, ghost_slope))
    }

    /// No stability guard; for instability demonstrations.
    pub fn new_unchecked(h: &PiecewiseLinear, f_bc: &PiecewiseLinear, dx: f64, dt: f64, sigma: f64, ghost_slope: Option<f64>) -> Self {
        Self { h: h.clone(), f_bc: f_bc.clone(), dx, dt, sigma, ghost_slope }
    }

    /// Advances `u` by one step into `out`.
    pub fn step(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let (dx, dt) = (self.dx, self.dt);
        out[0] = u[0] - dt * self.f_bc.eval((u[1] - u[0]) / dx);
        for i in 1..n - 1 {
            let back = (u[i] - u[i - 1]) / dx;
            let fwd = (u[i + 1] - u[i]) / dx;
            out[i] = u[i] - dt * numerical_hamiltonian(back, fwd, &self.h, self.sigma);
        }
        let back = (u[n - 1] - u[n - 2]) / dx;
        out[n - 1] = u[n - 1]
            - dt * match self.ghost_slope {
                Some(s) => numerical_hamiltonian(back, s, &self.h, self.sigma),
                None => self.h.eval(back),
            };
    }
}

/// Convenience wrapper over [`Scheme::step`] allocating the result.
pub fn step(u: &[f64], h: &PiecewiseLinear, f_bc: &PiecewiseLinear, dx: f64, dt: f64, sigma: f64) -> Result<Vec<f64>> {
    let slope = (u[u.len() - 1] - u[u.len() - 2]) / dx;
    let scheme = Scheme::new(h, f_bc, dx, dt, sigma, Some(slope))?;
    let mut out = vec![0.0; u.len()];
    scheme.step(u, &mut out);
    Ok(out)
}

/// Snapshots of a run on the nodes `x_i = i dx`.
#[derive(Clone, Debug)]
pub struct GridSolution {
    pub dx: f64,
    pub dt: f64,
    pub sigma: f64,
    pub length: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub hamiltonian: PiecewiseLinear,
    pub boundary_flux: PiecewiseLinear,
}

impl GridSolution {
    pub fn nodes(&self) -> usize {
        self.values[0].len()
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn last(&self) -> &[f64] {
        self.values.last().expect("at least the initial snapshot")
    }

    /// Nodes with `x <= L / 2`, shielded from the truncation.
    pub fn shielded_nodes(&self) -> usize {
        (0.5 * self.length / self.dx).floor() as usize + 1
    }

    /// Smallest `C` with `|u(t, x)| <= C (1 + x)` over the stored snapshots.
    pub fn growth_constant(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|row| row.iter().enumerate().map(|(i, v)| v.abs() / (1.0 + self.x(i))))
            .fold(0.0, f64::max)
    }
}

struct Layout {
    sigma: f64,
    dt: f64,
    steps: usize,
    nodes: usize,
    length: f64,
}

fn layout(h: &PiecewiseLinear, f_bc: &PiecewiseLinear, cfg: &SchemeConfig) -> Result<Layout> {
    if !(cfg.dx > 0.0 && cfg.t_final > 0.0 && cfg.cfl > 0.0) {
        return Err(Error::InvalidConfig("dx, T_final and cfl must be positive".into()));
    }
    let sigma = cfg.sigma.unwrap_or_else(|| default_sigma(h, f_bc));
    let steps = (cfg.t_final * sigma / (cfg.cfl * cfg.dx)).ceil().max(1.0) as usize;
    let dt = cfg.t_final / steps as f64;
    let length = match cfg.length {
        Some(l) if sigma * cfg.t_final >= 0.5 * l => {
            return Err(Error::InvalidConfig(format!(
                "domain length {l} too short: needs sigma * T = {} < L / 2",
                sigma * cfg.t_final
            )));
        }
        Some(l) => l,
        None => (2.5 * sigma * cfg.t_final / cfg.dx).ceil().max(8.0) * cfg.dx,
    };
    let nodes = (length / cfg.dx).round() as usize + 1;
    Ok(Layout { sigma, dt, steps, nodes, length })
}

fn run(
    h: &PiecewiseLinear,
    f_bc: &PiecewiseLinear,
    initial: Vec<f64>,
    cfg: &SchemeConfig,
    lay: &Layout,
) -> Result<GridSolution> {
    let n = initial.len();
    let ghost = match cfg.right {
        RightBoundary::InitialSlope => Some((initial[n - 1] - initial[n - 2]) / cfg.dx),
        RightBoundary::GhostSlope(s) => Some(s),
        RightBoundary::OneSided => None,
    };
    let scheme = if cfg.enforce_cfl {
        Scheme::new(h, f_bc, cfg.dx, lay.dt, lay.sigma, ghost)?
    } else {
        Scheme::new_unchecked(h, f_bc, cfg.dx, lay.dt, lay.sigma, ghost)
    };
    let every = (lay.steps / cfg.snapshots.max(1)).max(1);
    let mut times = vec![0.0];
    let mut values = vec![initial.clone()];
    let (mut u, mut next) = (initial, vec![0.0; n]);
    for k in 1..=lay.steps {
        scheme.step(&u, &mut next);
        std::mem::swap(&mut u, &mut next);
        if k % every == 0 || k == lay.steps {
            times.push(k as f64 * lay.dt);
            values.push(u.clone());
        }
    }
    Ok(GridSolution {
        dx: cfg.dx,
        dt: lay.dt,
        sigma: lay.sigma,
        length: lay.length,
        steps: lay.steps,
        times,
        values,
        hamiltonian: h.clone(),
        boundary_flux: f_bc.clone(),
    })
}

/// Marches `u0` to `T_final`, storing evenly spaced snapshots.
pub fn solve(h: &PiecewiseLinear, f_bc: &PiecewiseLinear, u0: &PiecewiseLinear, cfg: &SchemeConfig) -> Result<GridSolution> {
    let lay = layout(h, f_bc, cfg)?;
    let initial = (0..lay.nodes).map(|i| u0.eval(i as f64 * cfg.dx)).collect();
    run(h, f_bc, initial, cfg, &lay)
}

/// One level of a refinement study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub dx: f64,
    /// `max |u_F - u_{F_A}|` over shielded nodes and snapshot times.
    pub difference: f64,
    /// `log(D_prev / D) / log(dx_prev / dx)`; `None` on the coarsest level.
    pub order: Option<f64>,
}

/// Refinement study of the runs with boundary flux `F` and with its
/// effective flux `F_{A_F}`.
///
/// Both runs at a level share `sigma`, `dt` and the domain, so their
/// snapshots are simultaneous.
pub fn compare_runs(
    h: &PiecewiseLinear,
    f: &PiecewiseLinear,
    u0: &PiecewiseLinear,
    dxs: &[f64],
    base: &SchemeConfig,
) -> Result<Vec<RateRow>> {
    let fa = effective_flux(h, f)?.flux;
    let sigma = base.sigma.unwrap_or_else(|| default_sigma(h, f).max(default_sigma(h, &fa)));
    let mut rows: Vec<RateRow> = Vec::with_capacity(dxs.len());
    for &dx in dxs {
        let cfg = SchemeConfig { dx, sigma: Some(sigma), ..*base };
        let a = solve(h, f, u0, &cfg)?;
        let b = solve(h, &fa, u0, &cfg)?;
        let shielded = a.shielded_nodes();
        let difference = a
            .values
            .iter()
            .zip(&b.values)
            .flat_map(|(ra, rb)| ra[..shielded].iter().zip(&rb[..shielded]).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        let order = rows.last().map(|p| (p.difference / difference).ln() / (p.dx / dx).ln());
        rows.push(RateRow { dx, difference, order });
    }
    Ok(rows)
}

/// Least-squares slope of `log D` against `log dx`.
pub fn fitted_order(rows: &[RateRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.dx.ln(), r.difference.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub const ORDERING_TOL: f64 = 1e-12;

/// Outcome of a successful ordering check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderingReport {
    pub steps: usize,
    /// Smallest `u_high - u_low` seen over all steps and nodes.
    pub min_difference: f64,
}

/// Runs both initial states with the same scheme for `steps` steps and
/// checks `u_high - u_low >= -1e-12` at every node after every step.
///
/// `cfg.dx`, `cfg.cfl`, `cfg.sigma` and `cfg.enforce_cfl` are used; a
/// ghost slope taken from the initial data is read from `u_high`, so both
/// runs share the right boundary. `NaN` counts as a violation.
pub fn check_ordering(
    u_low: &[f64],
    u_high: &[f64],
    h: &PiecewiseLinear,
    f_bc: &PiecewiseLinear,
    cfg: &SchemeConfig,
    steps: usize,
) -> Result<OrderingReport> {
    if u_low.len() != u_high.len() || u_low.len() < 3 {
        return Err(Error::InvalidConfig("initial states need equal length >= 3".into()));
    }
    if let Some(i) = u_low.iter().zip(u_high).position(|(a, b)| a.partial_cmp(b).is_none_or(|o| o.is_gt())) {
        return Err(Error::InvalidConfig(format!("initial states not ordered at node {i}")));
    }
    let n = u_high.len();
    let sigma = cfg.sigma.unwrap_or_else(|| default_sigma(h, f_bc));
    let dt = cfg.cfl * cfg.dx / sigma;
    let ghost = match cfg.right {
        RightBoundary::InitialSlope => Some((u_high[n - 1] - u_high[n - 2]) / cfg.dx),
        RightBoundary::GhostSlope(s) => Some(s),
        RightBoundary::OneSided => None,
    };
    let scheme = if cfg.enforce_cfl {
        Scheme::new(h, f_bc, cfg.dx, dt, sigma, ghost)?
    } else {
        Scheme::new_unchecked(h, f_bc, cfg.dx, dt, sigma, ghost)
    };
    let (mut lo, mut hi) = (u_low.to_vec(), u_high.to_vec());
    let mut buf = vec![0.0; n];
    let mut min_difference = f64::INFINITY;
    for k in 1..=steps {
        scheme.step(&lo, &mut buf);
        std::mem::swap(&mut lo, &mut buf);
        scheme.step(&hi, &mut buf);
        std::mem::swap(&mut hi, &mut buf);
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            let diff = b - a;
            if diff.is_nan() || diff < -ORDERING_TOL {
                return Err(Error::OrderingViolated { step: k, node: i, diff });
            }
            min_difference = min_difference.min(diff);
        }
    }
    Ok(OrderingReport { steps, min_difference })
}
