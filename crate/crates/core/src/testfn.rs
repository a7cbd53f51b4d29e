//! Numerical construction of the coupling test function
//! `phi(t, x) = f(t) + g(x) + x E(t)` and a-posteriori checks of its
//! defining properties.
//!
//! The pieces are built in order:
//!
//! 1. an even majorant `G` of `max(((-F)^-1)', (-2F)^-1)`, non-decreasing in `|t|`;
//! 2. `E` solving `E' = 1 / G(-2F(E))`, `E(0) = 0`, by fixed-step RK4;
//! 3. `f` with `f' = -F(E)`, `f(0) = 0`, by the trapezoid rule;
//! 4. the envelopes `sup_t psi(t, x)` (for `x >= 0`) and `inf_t psi(t, x)`
//!    (for `x <= 0`) of `psi(t, x) = (-F)^-1(x E'(t) - F(E(t))) - E(t)`;
//! 5. `g'` dominating `2x` and the envelopes with a safety margin, and `g`.
//!
//! [`check_phi`] samples the differential inequalities
//! `phi_t + F(phi_x) <= 0` for `x >= 0` and `>= 0` for `x <= 0`, positivity
//! away from the origin and superlinearity. [`build_test_function`] runs the
//! whole pipeline, extending the time window until the envelope tail is
//! certified and retrying once on a finer grid with a doubled margin.

use std::fmt;

use crate::error::{Error, FailureList, Result};
use crate::pwl::PiecewiseLinear;

/// A strictly decreasing boundary flux with `F(0) = 0`.
#[derive(Clone, Debug)]
pub struct AdmissibleFlux {
    flux: PiecewiseLinear,
    rising_inv: PiecewiseLinear,
}

impl AdmissibleFlux {
    pub fn new(f: &PiecewiseLinear) -> Result<Self> {
        if !f.is_strictly_decreasing() {
            return Err(Error::NotStrictlyDecreasing);
        }
        let f0 = f.eval(0.0);
        if f0.abs() > 1e-12 {
            return Err(Error::InadmissibleFlux(format!("F(0) = {f0}, expected 0")));
        }
        let rising_inv = f.scaled(-1.0).inverse()?;
        Ok(Self { flux: f.clone(), rising_inv })
    }

    pub fn flux(&self) -> &PiecewiseLinear {
        &self.flux
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.flux.eval(p)
    }

    /// `(-F)^-1(y)`, the increasing inverse of `-F`.
    pub fn neg_inverse(&self, y: f64) -> f64 {
        self.rising_inv.eval(y)
    }
}

/// The even majorant `G` driving the time profile.
#[derive(Clone, Debug)]
pub struct Majorant {
    // (distance of a piece's value range from 0, running max of the slope of (-F)^-1)
    steps: Vec<(f64, f64)>,
    rising_inv: PiecewiseLinear,
}

impl Majorant {
    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        let k = self.steps.partition_point(|&(d, _)| d <= a);
        self.steps[k - 1].1.max(self.rising_inv.eval(a / 2.0))
    }
}

/// `G(t) = sup_{|s| <= |t|} max(((-F)^-1)'(s), (-2F)^-1(s))`.
///
/// `((-F)^-1)'` is piecewise constant; each piece contributes from the
/// distance of its (closed) value range to 0 onwards, so both one-sided
/// values count at a jump. `(-2F)^-1(s) = (-F)^-1(s/2)` is increasing,
/// hence its running sup is its value at `|t|`.
pub fn build_majorant(flux: &AdmissibleFlux) -> Majorant {
    let inv = &flux.rising_inv;
    let ys = inv.xs();
    let dist = |a: f64, b: f64| {
        if a <= 0.0 && 0.0 <= b {
            0.0
        } else if b < 0.0 {
            -b
        } else {
            a
        }
    };
    let mut raw = vec![
        (dist(f64::NEG_INFINITY, ys[0]), inv.left_slope()),
        (dist(ys[ys.len() - 1], f64::INFINITY), inv.right_slope()),
    ];
    for (w, s) in ys.windows(2).zip(inv.segment_slopes()) {
        raw.push((dist(w[0], w[1]), s));
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = 0.0f64;
    let steps = raw
        .into_iter()
        .map(|(d, s)| {
            best = best.max(s);
            (d, best)
        })
        .collect();
    Majorant { steps, rising_inv: inv.clone() }
}

/// `E` and `E'` on the uniform grid `t_i = (i - half) dt`.
#[derive(Clone, Debug)]
pub struct TimeProfile {
    pub dt: f64,
    pub half: usize,
    pub e: Vec<f64>,
    pub e_prime: Vec<f64>,
}

impl TimeProfile {
    pub fn t_max(&self) -> f64 {
        self.dt * self.half as f64
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        (i as f64 - self.half as f64) * self.dt
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let s = t / self.dt + self.half as f64;
        let i = (s.floor().max(0.0) as usize).min(self.len() - 2);
        (i, s - i as f64)
    }

    fn interp(v: &[f64], (i, w): (usize, f64)) -> f64 {
        v[i] + w * (v[i + 1] - v[i])
    }

    pub fn e_at(&self, t: f64) -> f64 {
        Self::interp(&self.e, self.locate(t))
    }

    pub fn e_prime_at(&self, t: f64) -> f64 {
        Self::interp(&self.e_prime, self.locate(t))
    }
}

/// Integrates `E' = 1 / G(-2F(E))`, `E(0) = 0` forward and backward with RK4.
pub fn solve_e(flux: &AdmissibleFlux, g: &Majorant, t_max: f64, dt: f64) -> Result<TimeProfile> {
    if !(dt > 0.0 && t_max > 0.0) {
        return Err(Error::InvalidBreakpoints("dt and T_max must be positive".into()));
    }
    let rhs = |e: f64| 1.0 / g.eval(-2.0 * flux.eval(e));
    let rk4 = |e: f64, h: f64| {
        let k1 = rhs(e);
        let k2 = rhs(e + 0.5 * h * k1);
        let k3 = rhs(e + 0.5 * h * k2);
        let k4 = rhs(e + h * k3);
        e + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let half = (t_max / dt).round() as usize;
    let mut e = vec![0.0; 2 * half + 1];
    for i in half..2 * half {
        e[i + 1] = rk4(e[i], dt);
    }
    for i in (1..=half).rev() {
        e[i - 1] = rk4(e[i], -dt);
    }
    if let Some(i) = e.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::StepTooLarge { t: (i as f64 - half as f64) * dt });
    }
    let e_prime = e.iter().map(|&v| rhs(v)).collect();
    Ok(TimeProfile { dt, half, e, e_prime })
}

/// `f(t_i) = int_0^{t_i} -F(E)` by the trapezoid rule.
pub fn build_f(time: &TimeProfile, flux: &AdmissibleFlux) -> Vec<f64> {
    let rate: Vec<f64> = time.e.iter().map(|&e| -flux.eval(e)).collect();
    let mut f = vec![0.0; time.len()];
    let h = 0.5 * time.dt;
    for i in time.half..time.len() - 1 {
        f[i + 1] = f[i] + h * (rate[i] + rate[i + 1]);
    }
    for i in (1..=time.half).rev() {
        f[i - 1] = f[i] - h * (rate[i] + rate[i - 1]);
    }
    f
}

/// `psi(t, x) = (-F)^-1(x E'(t) - F(E(t))) - E(t)` with interpolated `E`, `E'`.
pub fn psi(flux: &AdmissibleFlux, time: &TimeProfile, t: f64, x: f64) -> f64 {
    let e = time.e_at(t);
    flux.neg_inverse(x * time.e_prime_at(t) - flux.eval(e)) - e
}

fn psi_node(flux: &AdmissibleFlux, time: &TimeProfile, i: usize, x: f64) -> f64 {
    let e = time.e[i];
    flux.neg_inverse(x * time.e_prime[i] - flux.eval(e)) - e
}

/// Uniform grid on `[-r, r]` with an odd node count, so `x = 0` is a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceGrid {
    pub r: f64,
    pub nodes: usize,
}

impl SpaceGrid {
    pub fn new(r: f64, nodes: usize) -> Self {
        Self { r, nodes: nodes | 1 }
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.r / (self.nodes - 1) as f64
    }

    pub fn center(&self) -> usize {
        self.nodes / 2
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.dx()
    }
}

/// `sup_t psi(t, x)` at nodes `x >= 0` and `inf_t psi(t, x)` at nodes `x <= 0`.
#[derive(Clone, Debug)]
pub struct Envelopes {
    pub grid: SpaceGrid,
    pub bound: Vec<f64>,
}

// Full resolution for |t| <= CORE, geometric stride beyond.
const CORE: f64 = 2.0;
const STRIDE_GROWTH: f64 = 1.01;

fn coarse_indices(time: &TimeProfile) -> Vec<usize> {
    let core = ((CORE / time.dt) as usize).min(time.half);
    let mut offsets: Vec<usize> = (0..=core).collect();
    let mut k = core as f64;
    while (k as usize) < time.half {
        k = (k * STRIDE_GROWTH).max(k + 1.0);
        offsets.push((k as usize).min(time.half));
    }
    offsets.dedup();
    let mut idx: Vec<usize> = offsets.iter().rev().map(|&o| time.half - o).collect();
    idx.extend(offsets.iter().skip(1).map(|&o| time.half + o));
    idx
}

/// Certificate that `|t| > T_max` cannot raise `sup_t psi` above `x` on
/// `[0, R]` (nor lower `inf_t psi` below `x` on `[-R, 0]`).
///
/// On `t >= T`, `E'` decreases and `|F(E)|` increases, so `R E'(T) <= |F(E(T))|`
/// gives `|x E' - F(E)| <= 2 |F(E)|` and `psi <= x E' G(-2F(E)) = x`.
pub fn tail_certificate(flux: &AdmissibleFlux, time: &TimeProfile, r: f64) -> Result<()> {
    for i in [0, time.len() - 1] {
        let lhs = r * time.e_prime[i];
        let rhs = flux.eval(time.e[i]).abs();
        if lhs > rhs {
            return Err(Error::TailBoundUnverified { t_max: time.t_max(), lhs, rhs });
        }
    }
    Ok(())
}

/// Envelopes of `psi` over the time grid, after checking the tail certificate.
///
/// Each node is searched on a coarse time grid (every node for `|t| <= 2`,
/// then a stride growing by 1% per sample), and the best coarse sample is
/// refined at full resolution between its coarse neighbours.
pub fn psi_envelopes(flux: &AdmissibleFlux, time: &TimeProfile, grid: SpaceGrid) -> Result<Envelopes> {
    tail_certificate(flux, time, grid.r)?;
    let coarse = coarse_indices(time);
    let mut bound = vec![0.0; grid.nodes];
    for (j, b) in bound.iter_mut().enumerate() {
        let x = grid.x(j);
        if x == 0.0 {
            continue;
        }
        // search for the max of sign * psi
        let sign = x.signum();
        let score = |i: usize| sign * psi_node(flux, time, i, x);
        let (k, _) = coarse
            .iter()
            .enumerate()
            .map(|(k, &i)| (k, score(i)))
            .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
        let lo = coarse[k.saturating_sub(1)];
        let hi = coarse[(k + 1).min(coarse.len() - 1)];
        let best = (lo..=hi).map(score).fold(f64::NEG_INFINITY, f64::max);
        *b = sign * best;
    }
    Ok(Envelopes { grid, bound })
}

/// `g'` at the nodes of a space grid, linearly interpolated, and `g`
/// integrated exactly from it.
#[derive(Clone, Debug)]
pub struct SpaceProfile {
    pub grid: SpaceGrid,
    pub g_prime: Vec<f64>,
    pub g: Vec<f64>,
}

impl SpaceProfile {
    /// Integrates the interpolant of `g_prime` from `g(0) = 0`.
    pub fn from_derivative(grid: SpaceGrid, g_prime: Vec<f64>) -> Self {
        let c = grid.center();
        let h = 0.5 * grid.dx();
        let mut g = vec![0.0; grid.nodes];
        for i in c..grid.nodes - 1 {
            g[i + 1] = g[i] + h * (g_prime[i] + g_prime[i + 1]);
        }
        for i in (1..=c).rev() {
            g[i - 1] = g[i] - h * (g_prime[i] + g_prime[i - 1]);
        }
        Self { grid, g_prime, g }
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let s = x / self.grid.dx() + self.grid.center() as f64;
        let i = (s.floor().max(0.0) as usize).min(self.grid.nodes - 2);
        (i, s - i as f64)
    }

    pub fn g_prime_at(&self, x: f64) -> f64 {
        let (i, w) = self.locate(x);
        self.g_prime[i] + w * (self.g_prime[i + 1] - self.g_prime[i])
    }

    pub fn g_at(&self, x: f64) -> f64 {
        let (i, w) = self.locate(x);
        let (a, b) = (self.g_prime[i], self.g_prime[i + 1]);
        self.g[i] + self.grid.dx() * w * (a + 0.5 * w * (b - a))
    }
}

/// `g' = (1 + margin) max(2x, sup psi)` for `x >= 0`, `(1 + margin) min(2x, inf psi)` for `x <= 0`.
pub fn build_g(env: &Envelopes, margin: f64) -> SpaceProfile {
    let scale = 1.0 + margin;
    let g_prime = env
        .bound
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let x = env.grid.x(j);
            if x > 0.0 {
                scale * (2.0 * x).max(b)
            } else if x < 0.0 {
                scale * (2.0 * x).min(b)
            } else {
                0.0
            }
        })
        .collect();
    SpaceProfile::from_derivative(env.grid, g_prime)
}

/// All tables of `phi` with evaluators for `phi` and its partials.
#[derive(Clone, Debug)]
pub struct TestFunctionTables {
    pub flux: AdmissibleFlux,
    pub time: TimeProfile,
    pub f: Vec<f64>,
    pub space: SpaceProfile,
}

/// Bundles the tables; `phi(0, 0) = 0` holds by construction.
pub fn assemble_phi(flux: &AdmissibleFlux, time: TimeProfile, f: Vec<f64>, space: SpaceProfile) -> TestFunctionTables {
    TestFunctionTables { flux: flux.clone(), time, f, space }
}

impl TestFunctionTables {
    /// `f` between nodes, integrating the interpolant of `f' = -F(E)` exactly.
    pub fn f_at(&self, t: f64) -> f64 {
        let (i, w) = self.time.locate(t);
        let a = -self.flux.eval(self.time.e[i]);
        let b = -self.flux.eval(self.time.e[i + 1]);
        self.f[i] + self.time.dt * w * (a + 0.5 * w * (b - a))
    }

    pub fn phi(&self, t: f64, x: f64) -> f64 {
        self.f_at(t) + self.space.g_at(x) + x * self.time.e_at(t)
    }

    pub fn phi_t(&self, t: f64, x: f64) -> f64 {
        -self.flux.eval(self.time.e_at(t)) + x * self.time.e_prime_at(t)
    }

    pub fn phi_x(&self, t: f64, x: f64) -> f64 {
        self.space.g_prime_at(x) + self.time.e_at(t)
    }

    /// `phi_t + F(phi_x)`, which must be `<= 0` for `x >= 0` and `>= 0` for `x <= 0`.
    pub fn residual(&self, t: f64, x: f64) -> f64 {
        self.phi_t(t, x) + self.flux.eval(self.phi_x(t, x))
    }
}

/// Uniform `nt x nx` sample grid on `[-t_half, t_half] x [-x_half, x_half]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSpec {
    pub t_half: f64,
    pub x_half: f64,
    pub nt: usize,
    pub nx: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { t_half: 10.0, x_half: 10.0, nt: 512, nx: 512 }
    }
}

pub const SIGN_TOL: f64 = 1e-9;
pub const ORIGIN_RADIUS: f64 = 1e-3;
pub const RAY_COUNT: usize = 16;
pub const RAY_RADII: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Worst-case margins of the three property checks.
#[derive(Clone, Debug, Default)]
pub struct PhiReport {
    pub samples: usize,
    /// max of `phi_t + F(phi_x)` over samples with `x >= 0`.
    pub max_residual_right: f64,
    /// min of `phi_t + F(phi_x)` over samples with `x <= 0`.
    pub min_residual_left: f64,
    /// min of `phi` over samples with `|(t, x)| >= 1e-3`.
    pub min_phi: f64,
    /// min of `phi - (f - E^2/2 + x^2/2)`.
    pub min_lower_gap: f64,
    /// Rays along which `phi(r u) / r` fails to increase over the radii.
    pub ray_failures: usize,
    pub failures: Vec<String>,
}

impl PhiReport {
    pub fn sign_ok(&self) -> bool {
        self.max_residual_right <= SIGN_TOL && self.min_residual_left >= -SIGN_TOL
    }

    pub fn positivity_ok(&self) -> bool {
        self.min_phi > 0.0
    }

    pub fn superlinearity_ok(&self) -> bool {
        self.min_lower_gap >= -SIGN_TOL && self.ray_failures == 0
    }

    pub fn passed(&self) -> bool {
        self.sign_ok() && self.positivity_ok() && self.superlinearity_ok()
    }
}

impl fmt::Display for PhiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(f, "samples: {}", self.samples)?;
        writeln!(
            f,
            "differential inequalities: {} (max residual x>=0: {:.6e}, min residual x<=0: {:.6e})",
            verdict(self.sign_ok()),
            self.max_residual_right,
            self.min_residual_left
        )?;
        writeln!(f, "positivity: {} (min phi away from origin: {:.6e})", verdict(self.positivity_ok()), self.min_phi)?;
        write!(
            f,
            "superlinearity: {} (min lower-bound gap: {:.6e}, failing rays: {}/{})",
            verdict(self.superlinearity_ok()),
            self.min_lower_gap,
            self.ray_failures,
            RAY_COUNT
        )?;
        for item in self.failures.iter().take(10) {
            write!(f, "\n  {item}")?;
        }
        Ok(())
    }
}

fn axis(half: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { 0.0 } else { -half + 2.0 * half * i as f64 / (n - 1) as f64 })
}

/// Evaluates the three property checks on a sample grid and along rays.
pub fn check_phi(tables: &TestFunctionTables, spec: &SampleSpec) -> PhiReport {
    let mut r = PhiReport {
        max_residual_right: f64::NEG_INFINITY,
        min_residual_left: f64::INFINITY,
        min_phi: f64::INFINITY,
        min_lower_gap: f64::INFINITY,
        ..Default::default()
    };
    for t in axis(spec.t_half, spec.nt) {
        for x in axis(spec.x_half, spec.nx) {
            r.samples += 1;
            let res = tables.residual(t, x);
            if x >= 0.0 {
                r.max_residual_right = r.max_residual_right.max(res);
                if res > SIGN_TOL {
                    r.failures.push(format!("phi_t + F(phi_x) = {res:.3e} > 0 at (t, x) = ({t}, {x})"));
                }
            }
            if x <= 0.0 {
                r.min_residual_left = r.min_residual_left.min(res);
                if res < -SIGN_TOL {
                    r.failures.push(format!("phi_t + F(phi_x) = {res:.3e} < 0 at (t, x) = ({t}, {x})"));
                }
            }
            let phi = tables.phi(t, x);
            if t.hypot(x) >= ORIGIN_RADIUS {
                r.min_phi = r.min_phi.min(phi);
                if phi <= 0.0 {
                    r.failures.push(format!("phi = {phi:.3e} <= 0 at (t, x) = ({t}, {x})"));
                }
            }
            let e = tables.time.e_at(t);
            let gap = phi - (tables.f_at(t) - 0.5 * e * e + 0.5 * x * x);
            r.min_lower_gap = r.min_lower_gap.min(gap);
            if gap < -SIGN_TOL {
                r.failures.push(format!("phi below f - E^2/2 + x^2/2 by {:.3e} at (t, x) = ({t}, {x})", -gap));
            }
        }
    }
    for k in 0..RAY_COUNT {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / RAY_COUNT as f64;
        let (ct, sx) = (theta.cos(), theta.sin());
        let ratios: Vec<f64> = RAY_RADII.iter().map(|&rad| tables.phi(rad * ct, rad * sx) / rad).collect();
        if ratios.windows(2).any(|w| w[1] <= w[0]) {
            r.ray_failures += 1;
            r.failures.push(format!("phi(r u)/r not increasing along angle {theta:.4}: {ratios:?}"));
        }
    }
    r
}

/// [`check_phi`], failing with the offending samples.
pub fn verify_phi(tables: &TestFunctionTables, spec: &SampleSpec) -> Result<PhiReport> {
    let report = check_phi(tables, spec);
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::VerificationFailed(FailureList(report.failures)))
    }
}

/// Numerical parameters of [`build_test_function`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunctionParams {
    pub dt: f64,
    pub t_max: f64,
    pub r: f64,
    pub x_nodes: usize,
    pub margin: f64,
    /// How many times `T_max` may double before the tail certificate gives up.
    pub max_extensions: usize,
    pub samples: SampleSpec,
}

impl Default for TestFunctionParams {
    fn default() -> Self {
        Self { dt: 1e-3, t_max: 100.0, r: 50.0, x_nodes: 2001, margin: 0.05, max_extensions: 6, samples: SampleSpec::default() }
    }
}

/// Result of the full pipeline.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub tables: TestFunctionTables,
    pub report: PhiReport,
    /// Final time window after automatic extension.
    pub t_max: f64,
    pub margin: f64,
    /// Whether the refined retry was needed.
    pub refined: bool,
}

fn build_once(flux: &AdmissibleFlux, p: &TestFunctionParams) -> Result<(TestFunctionTables, f64)> {
    let g = build_majorant(flux);
    let grid = SpaceGrid::new(p.r, p.x_nodes);
    let mut t_max = p.t_max;
    for attempt in 0..=p.max_extensions {
        let time = solve_e(flux, &g, t_max, p.dt)?;
        match psi_envelopes(flux, &time, grid) {
            Ok(env) => {
                let f = build_f(&time, flux);
                let space = build_g(&env, p.margin);
                return Ok((assemble_phi(flux, time, f, space), t_max));
            }
            Err(Error::TailBoundUnverified { .. }) if attempt < p.max_extensions => t_max *= 2.0,
            Err(e) => return Err(e),
        }
    }
    unreachable!("the last attempt returns")
}

/// Builds and verifies `phi` for an admissible flux.
///
/// On a failed check the time and space grids are refined by two and the
/// margin doubled, once.
pub fn build_test_function(f: &PiecewiseLinear, params: &TestFunctionParams) -> Result<TestFunction> {
    let flux = AdmissibleFlux::new(f)?;
    let (tables, t_max) = build_once(&flux, params)?;
    let report = check_phi(&tables, &params.samples);
    if report.passed() {
        return Ok(TestFunction { tables, report, t_max, margin: params.margin, refined: false });
    }
    let retry = TestFunctionParams {
        dt: params.dt / 2.0,
        x_nodes: 2 * params.x_nodes - 1,
        margin: 2.0 * params.margin,
        t_max,
        ..*params
    };
    let (tables, t_max) = build_once(&flux, &retry)?;
    let report = verify_phi(&tables, &retry.samples)?;
    Ok(TestFunction { tables, report, t_max, margin: retry.margin, refined: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{preset, ADMISSIBLE_FLUXES};
    use approx::assert_abs_diff_eq;

    fn lin() -> AdmissibleFlux {
        AdmissibleFlux::new(&preset("linear").unwrap()).unwrap()
    }

    fn e_exact(t: f64) -> f64 {
        if t.abs() <= 1.0 {
            t
        } else {
            t.signum() * (2.0 * t.abs() - 1.0).sqrt()
        }
    }

    fn lin_time() -> TimeProfile {
        let f = lin();
        solve_e(&f, &build_majorant(&f), 100.0, 1e-3).unwrap()
    }

    #[test]
    fn majorant_of_linear_flux() {
        let g = build_majorant(&lin());
        for t in [-7.0, -2.0, -0.3, 0.0, 0.9, 2.0, 3.5, 40.0] {
            assert_abs_diff_eq!(g.eval(t), f64::max(1.0, t.abs() / 2.0), epsilon = 1e-15);
        }
    }

    #[test]
    fn majorant_is_even_and_monotone() {
        for name in ADMISSIBLE_FLUXES {
            let f = AdmissibleFlux::new(&preset(name).unwrap()).unwrap();
            let g = build_majorant(&f);
            let mut prev = 0.0;
            for k in 0..2000 {
                let t = k as f64 * 0.01;
                assert_eq!(g.eval(t), g.eval(-t), "{name}");
                assert!(g.eval(t) >= prev && g.eval(t) > 0.0, "{name}");
                prev = g.eval(t);
                // dominates (-2F)^-1 at both signs
                assert!(g.eval(t) >= f.neg_inverse(t / 2.0) && g.eval(t) >= f.neg_inverse(-t / 2.0));
            }
        }
    }

    #[test]
    fn flat_flux_is_rejected() {
        assert!(matches!(AdmissibleFlux::new(&preset("staircaseF").unwrap()), Err(Error::NotStrictlyDecreasing)));
        let shifted = preset("linear").unwrap().shifted(1.0);
        assert!(matches!(AdmissibleFlux::new(&shifted), Err(Error::InadmissibleFlux(_))));
    }

    #[test]
    fn e_matches_closed_form() {
        let time = lin_time();
        for (t, want) in [(0.5, 0.5), (1.0, 1.0), (5.0, 3.0)] {
            assert_abs_diff_eq!(time.e_at(t), want, epsilon = 1e-6);
            assert_abs_diff_eq!(time.e_at(t), e_exact(t), epsilon = 1e-6);
        }
        assert_eq!(time.e[time.half], 0.0);
        for i in 0..time.half {
            assert_abs_diff_eq!(time.e[i], -time.e[time.len() - 1 - i], epsilon = 1e-9);
        }
        // E' -> 0 at the ends of the window
        assert!(time.e_prime[0] <= 0.1 && time.e_prime[time.len() - 1] <= 0.1);
    }

    #[test]
    fn e_prime_bounded_by_slope_at_origin() {
        for name in ADMISSIBLE_FLUXES {
            let f = AdmissibleFlux::new(&preset(name).unwrap()).unwrap();
            let g = build_majorant(&f);
            let time = solve_e(&f, &g, 20.0, 1e-2).unwrap();
            let cap = 1.0 / g.eval(0.0);
            assert!(time.e_prime.iter().all(|&v| v > 0.0 && v <= cap + 1e-15), "{name}");
        }
    }

    #[test]
    fn rk4_order_on_linear_flux() {
        let f = lin();
        let g = build_majorant(&f);
        let err = |dt: f64| {
            let time = solve_e(&f, &g, 8.0, dt).unwrap();
            (0..time.len()).map(|i| (time.e[i] - e_exact(time.t(i))).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.2), err(0.1));
        let order = (e1 / e2).log2();
        assert!(order >= 3.5, "observed order {order} ({e1:e}, {e2:e})");
    }

    #[test]
    fn invalid_step_is_rejected() {
        let f = AdmissibleFlux::new(&preset("steepF").unwrap()).unwrap();
        let g = build_majorant(&f);
        assert!(solve_e(&f, &g, 10.0, 1e-2).is_ok());
        assert!(solve_e(&f, &g, 10.0, 0.0).is_err());
    }

    #[test]
    fn f_matches_closed_form() {
        let f = build_f(&lin_time(), &lin());
        let time = lin_time();
        let at = |t: f64| f[(t / time.dt).round() as usize + time.half];
        assert_eq!(at(0.0), 0.0);
        assert_abs_diff_eq!(at(1.0), 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(at(5.0), 0.5 + 26.0 / 3.0, epsilon = 1e-5);
        assert!(f.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-9));
    }

    #[test]
    fn psi_values() {
        let (f, time) = (lin(), lin_time());
        assert_abs_diff_eq!(psi(&f, &time, 0.0, 3.0), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(psi(&f, &time, 5.0, 1.0), 1.0 / 3.0, epsilon = 1e-6);
        let asym = AdmissibleFlux::new(&preset("asymF").unwrap()).unwrap();
        let time = solve_e(&asym, &build_majorant(&asym), 10.0, 1e-2).unwrap();
        for t in [-4.0, -0.5, 0.0, 2.0, 7.5] {
            assert_abs_diff_eq!(psi(&asym, &time, t, 0.0), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn envelopes_of_linear_flux() {
        let (f, time) = (lin(), lin_time());
        let env = psi_envelopes(&f, &time, SpaceGrid::new(50.0, 201)).unwrap();
        for (j, &b) in env.bound.iter().enumerate() {
            assert_abs_diff_eq!(b, env.grid.x(j), epsilon = 1e-9);
        }
    }

    #[test]
    fn tail_certificate_needs_long_window() {
        let f = lin();
        let time = solve_e(&f, &build_majorant(&f), 5.0, 1e-2).unwrap();
        assert!(matches!(
            psi_envelopes(&f, &time, SpaceGrid::new(50.0, 11)),
            Err(Error::TailBoundUnverified { .. })
        ));
    }

    #[test]
    fn g_of_linear_flux() {
        let (f, time) = (lin(), lin_time());
        let env = psi_envelopes(&f, &time, SpaceGrid::new(50.0, 2001)).unwrap();
        let space = build_g(&env, 0.05);
        let c = space.grid.center();
        assert_eq!((space.g[c], space.g_prime[c]), (0.0, 0.0));
        for j in 0..space.grid.nodes {
            let x = space.grid.x(j);
            assert_abs_diff_eq!(space.g_prime[j], 2.1 * x, epsilon = 1e-9);
            assert!(space.g[j] >= x * x);
        }
        assert_abs_diff_eq!(space.g_at(0.123), 1.05 * 0.123 * 0.123, epsilon = 1e-12);
    }

    #[test]
    fn phi_at_origin() {
        let tf = build_test_function(&preset("linear").unwrap(), &TestFunctionParams::default()).unwrap();
        assert_eq!(tf.tables.phi(0.0, 0.0), 0.0);
        assert_eq!(tf.tables.phi_x(0.0, 0.0), 0.0);
        assert_eq!(tf.tables.residual(0.0, 0.0), 0.0);
        assert!(!tf.refined);
    }

    #[test]
    fn sabotaged_g_fails() {
        let (f, time) = (lin(), lin_time());
        let fv = build_f(&time, &f);
        let grid = SpaceGrid::new(50.0, 2001);
        let half_slope = (0..grid.nodes).map(|j| 0.5 * grid.x(j)).collect();
        let tables = assemble_phi(&f, time, fv, SpaceProfile::from_derivative(grid, half_slope));
        let spec = SampleSpec { nt: 100, nx: 100, ..SampleSpec::default() };
        assert!(matches!(verify_phi(&tables, &spec), Err(Error::VerificationFailed(_))));
    }

    #[test]
    fn quadratic_variant_residual() {
        // with g(x) = x^2 the residual collapses to x (E'(t) - 2)
        let (f, time) = (lin(), lin_time());
        let fv = build_f(&time, &f);
        let grid = SpaceGrid::new(50.0, 2001);
        let slope = (0..grid.nodes).map(|j| 2.0 * grid.x(j)).collect();
        let tables = assemble_phi(&f, time, fv, SpaceProfile::from_derivative(grid, slope));
        for (t, x) in [(0.3, 1.0), (-4.0, 2.5), (7.0, -3.0)] {
            let want = x * (tables.time.e_prime_at(t) - 2.0);
            assert_abs_diff_eq!(tables.residual(t, x), want, epsilon = 1e-9);
        }
    }
}
