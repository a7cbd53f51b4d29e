//! Set limiters and limited flux functions for a coercive hamiltonian.
//!
//! For a coercive piecewise-linear `H` and a slope `p`, the numbers
//!
//! ```text
//! p- = sup { q < p : H(q) >= H(p) },    p+ = inf { q > p : H(q) <= H(p) }
//! ```
//!
//! bracket the excursion of `H` below (resp. above) the level `H(p)`. A set
//! limiter is a finite list of slopes whose plateaus `[p-, p+]` flatten
//! every non-decreasing part of `H`; the limited flux `F_A` equals `H`
//! outside the plateaus and the plateau level on each of them.
//!
//! [`compute_set_limiter`] classifies a general non-increasing boundary
//! function `F` by its unique limiter `A_F`. A candidate `p` belongs to
//! `A_F` when it is a "lower" point (`p- < p`, `F(p) >= H(p)`, and no
//! higher level reachable from `(p-, p)` lies in `{F >= H}`) or the mirrored
//! "upper" point. The quantified condition reduces to a single evaluation of
//! `F` where the sublevel component of `H` through `p` ends, so the whole
//! classification is a finite scan over knots and `F - H` crossings.

use std::fmt;

use crate::error::{Error, Result};
use crate::pwl::{crossings, near, PiecewiseLinear, REL_TOL};

const VALUE_TOL: f64 = 1e-11;

fn le(v: f64, c: f64) -> bool {
    v <= c + VALUE_TOL * (1.0 + c.abs())
}

fn ge(v: f64, c: f64) -> bool {
    v >= c - VALUE_TOL * (1.0 + c.abs())
}

/// `p-` and `p+` for a slope `p`; `p_plus` may be `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeBounds {
    pub p_minus: f64,
    pub p_plus: f64,
}

/// One element `p_alpha` of a set limiter with its plateau and level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimiterPoint {
    pub p_alpha: f64,
    pub p_minus: f64,
    pub p_plus: f64,
    pub level: f64,
}

impl LimiterPoint {
    pub fn plateau(&self) -> (f64, f64) {
        (self.p_minus, self.p_plus)
    }

    fn same_plateau(&self, other: &Self) -> bool {
        near(self.p_minus, other.p_minus, REL_TOL)
            && (self.p_plus == other.p_plus || near(self.p_plus, other.p_plus, REL_TOL))
    }
}

/// A finite set limiter, sorted by `p_alpha`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SetLimiter {
    points: Vec<LimiterPoint>,
}

/// A limited flux function together with the limiter it was built from.
#[derive(Clone, Debug)]
pub struct EffectiveFlux {
    pub flux: PiecewiseLinear,
    pub limiter: SetLimiter,
}

// Piece of a PL function scanned to the right of a start point. The last
// piece is the tail, with `b = +inf`.
#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    va: f64,
    vb: f64,
    slope: f64,
}

fn pieces_from(f: &PiecewiseLinear, p: f64) -> impl Iterator<Item = Piece> + '_ {
    let start = (p, f.eval(p));
    let knots = f.breakpoints().filter(move |&(x, _)| x > p);
    let ends = knots.map(Some).chain(std::iter::once(None));
    ends.scan(start, move |cur, end| {
        let (a, va) = *cur;
        Some(match end {
            Some((b, vb)) => {
                *cur = (b, vb);
                Piece { a, b, va, vb, slope: (vb - va) / (b - a) }
            }
            None => {
                let s = f.right_slope();
                let vb = if s == 0.0 { va } else { s.signum() * f64::INFINITY };
                Piece { a, b: f64::INFINITY, va, vb, slope: s }
            }
        })
    })
}

/// `inf { q > p : f(q) <= c }`, `+inf` when the set is empty.
fn first_at_or_below(f: &PiecewiseLinear, p: f64, c: f64) -> f64 {
    for (k, pc) in pieces_from(f, p).enumerate() {
        let starts_inside = if k == 0 {
            le(pc.va, c) && (pc.slope <= 0.0 || pc.va < c - VALUE_TOL * (1.0 + c.abs()))
        } else {
            le(pc.va, c)
        };
        if starts_inside {
            return pc.a;
        }
        if pc.slope < 0.0 && le(pc.vb, c) {
            return (pc.a + (c - pc.va) / pc.slope).clamp(pc.a, pc.b);
        }
    }
    f64::INFINITY
}

/// `inf { q >= p : f(q) > c }`, `None` when `f <= c` on `[p, inf)`.
fn first_above(f: &PiecewiseLinear, p: f64, c: f64) -> Option<f64> {
    for pc in pieces_from(f, p) {
        if !le(pc.va, c) {
            return Some(pc.a);
        }
        if pc.slope > 0.0 && !le(pc.vb, c) {
            return Some((pc.a + (c - pc.va) / pc.slope).clamp(pc.a, pc.b));
        }
    }
    None
}

/// `inf { q >= p : f(q) < c }`, `None` when `f >= c` on `[p, inf)`.
fn first_below(f: &PiecewiseLinear, p: f64, c: f64) -> Option<f64> {
    first_above(&f.scaled(-1.0), p, -c)
}

/// Scans of a hamiltonian to the left and to the right of a slope.
///
/// Leftward scans run on the reflection `s -> -H(-s)`, which turns every
/// `sup` to the left into an `inf` to the right.
struct Landscape<'a> {
    h: &'a PiecewiseLinear,
    reflected: PiecewiseLinear,
}

impl<'a> Landscape<'a> {
    fn new(h: &'a PiecewiseLinear) -> Self {
        Self { h, reflected: h.reflect() }
    }

    fn bounds(&self, p: f64) -> SlopeBounds {
        let c = self.h.eval(p);
        let p_plus = first_at_or_below(self.h, p, c);
        let p_minus = -first_at_or_below(&self.reflected, -p, -c);
        SlopeBounds { p_minus, p_plus }
    }

    /// End of the component of `{H <= c}` containing `p`, moving right.
    fn exit_right(&self, p: f64, c: f64) -> Option<f64> {
        first_above(self.h, p, c)
    }

    /// End of the component of `{H >= c}` containing `p`, moving left.
    fn exit_left(&self, p: f64, c: f64) -> Option<f64> {
        first_above(&self.reflected, -p, -c).map(|s| -s)
    }

    /// `sup { q < m : H(q) > c }`.
    fn last_above_left(&self, m: f64, c: f64) -> Option<f64> {
        first_below(&self.reflected, -m, -c).map(|s| -s)
    }

    /// `inf { q > m : H(q) < c }`.
    fn first_below_right(&self, m: f64, c: f64) -> Option<f64> {
        first_below(self.h, m, c)
    }

    fn point(&self, p: f64) -> LimiterPoint {
        let b = self.bounds(p);
        LimiterPoint { p_alpha: p, p_minus: b.p_minus, p_plus: b.p_plus, level: self.h.eval(p) }
    }
}

fn require_coercive(h: &PiecewiseLinear) -> Result<()> {
    if h.is_coercive() {
        Ok(())
    } else {
        Err(Error::NotCoercive)
    }
}

fn require_admissible_flux(f: &PiecewiseLinear) -> Result<()> {
    if !f.is_non_increasing() {
        return Err(Error::InadmissibleFlux("F must be non-increasing".into()));
    }
    if !f.is_semicoercive() {
        return Err(Error::InadmissibleFlux("F must tend to +inf as p -> -inf".into()));
    }
    Ok(())
}

/// Computes `p-` and `p+` for `p` by scanning the segments of `H`.
pub fn slope_bounds(h: &PiecewiseLinear, p: f64) -> Result<SlopeBounds> {
    require_coercive(h)?;
    Ok(Landscape::new(h).bounds(p))
}

impl SetLimiter {
    /// Builds a limiter from its slopes, computing plateaus and levels from `H`.
    pub fn from_points(h: &PiecewiseLinear, slopes: &[f64]) -> Result<Self> {
        require_coercive(h)?;
        let land = Landscape::new(h);
        Ok(Self::from_records(slopes.iter().map(|&p| land.point(p)).collect()))
    }

    /// Wraps raw records as given; use [`validate_set_limiter`] to check them.
    pub fn from_records(mut points: Vec<LimiterPoint>) -> Self {
        points.sort_by(|a, b| a.p_alpha.total_cmp(&b.p_alpha));
        Self { points }
    }

    pub fn points(&self) -> &[LimiterPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same plateaus and levels up to a relative tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|(a, b)| {
                near(a.p_minus, b.p_minus, tol)
                    && (a.p_plus == b.p_plus || near(a.p_plus, b.p_plus, tol))
                    && near(a.level, b.level, tol)
            })
    }

    /// `p_alpha,p_minus,p_plus,level` CSV; an unbounded plateau is written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p_alpha,p_minus,p_plus,level\n");
        for pt in &self.points {
            out.push_str(&format!("{},{},{},{}\n", pt.p_alpha, pt.p_minus, pt.p_plus, pt.level));
        }
        out
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            if i == 0 && line.trim_start().starts_with("p_alpha") {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Csv(format!("line {}: {e}", i + 1)))?;
            if cols.len() != 4 {
                return Err(Error::Csv(format!("line {}: expected 4 columns", i + 1)));
            }
            points.push(LimiterPoint { p_alpha: cols[0], p_minus: cols[1], p_plus: cols[2], level: cols[3] });
        }
        Ok(Self::from_records(points))
    }
}

/// A reason why a list of points fails to be a set limiter for `H`.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// Stored plateau or level disagrees with `H`.
    InconsistentRecord { p_alpha: f64, expected: LimiterPoint },
    /// `p_alpha- == p_alpha+`.
    DegeneratePlateau { p_alpha: f64 },
    /// `p1 < p2` but `H(p1) < H(p2)`.
    LevelsIncreasing { left: f64, right: f64 },
    /// Two open plateaus intersect.
    OverlappingPlateaus { left: f64, right: f64 },
    /// Some interval `(p-, p)` near the local minimum `near` meets no plateau.
    LowerCoverMissing { near: f64 },
    /// Some interval `(p, p+)` near the local maximum `near` meets no plateau.
    UpperCoverMissing { near: f64 },
    /// Intervals `(p, +inf)` on the right tail meet no plateau.
    NoUnboundedPlateau,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InconsistentRecord { p_alpha, expected } => write!(
                f,
                "record at p_alpha={p_alpha} disagrees with H (expected plateau [{}, {}], level {})",
                expected.p_minus, expected.p_plus, expected.level
            ),
            Self::DegeneratePlateau { p_alpha } => write!(f, "condition 1: degenerate plateau at p_alpha={p_alpha}"),
            Self::LevelsIncreasing { left, right } => {
                write!(f, "condition 2: level increases between p_alpha={left} and p_alpha={right}")
            }
            Self::OverlappingPlateaus { left, right } => {
                write!(f, "plateaus of p_alpha={left} and p_alpha={right} overlap")
            }
            Self::LowerCoverMissing { near } => {
                write!(f, "condition 3 (covering): no plateau meets (p-, p) for p just right of {near}")
            }
            Self::UpperCoverMissing { near } => {
                write!(f, "condition 3 (covering): no plateau meets (p, p+) for p just left of {near}")
            }
            Self::NoUnboundedPlateau => {
                write!(f, "condition 3 (covering): no plateau meets (p, +inf) for large p")
            }
        }
    }
}

/// Outcome of [`validate_set_limiter`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn covering_violated(&self) -> bool {
        self.violations.iter().any(|v| {
            matches!(
                v,
                Violation::LowerCoverMissing { .. } | Violation::UpperCoverMissing { .. } | Violation::NoUnboundedPlateau
            )
        })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid set limiter");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the set-limiter conditions for `A` against `H`.
///
/// The covering condition quantifies over all real `p`. Every interval
/// `(p-, p)` contains a neighbourhood of a knot of `H` at which `H` starts
/// to rise, and every bounded `(p, p+)` one of a knot where `H` stops
/// rising; intervals `(p, +inf)` need an unbounded plateau. Checking the
/// limiting intervals at those knots is therefore exhaustive.
pub fn validate_set_limiter(a: &SetLimiter, h: &PiecewiseLinear) -> Result<ValidationReport> {
    require_coercive(h)?;
    let land = Landscape::new(h);
    let mut violations = Vec::new();

    for pt in &a.points {
        let expected = land.point(pt.p_alpha);
        let plus_ok = if expected.p_plus.is_infinite() {
            pt.p_plus == f64::INFINITY
        } else {
            near(pt.p_plus, expected.p_plus, REL_TOL)
        };
        if !(near(pt.p_minus, expected.p_minus, REL_TOL) && plus_ok && near(pt.level, expected.level, REL_TOL)) {
            violations.push(Violation::InconsistentRecord { p_alpha: pt.p_alpha, expected });
        }
        if pt.p_minus == pt.p_plus {
            violations.push(Violation::DegeneratePlateau { p_alpha: pt.p_alpha });
        }
    }
    for w in a.points.windows(2) {
        if w[0].p_alpha < w[1].p_alpha && !ge(w[0].level, w[1].level) {
            violations.push(Violation::LevelsIncreasing { left: w[0].p_alpha, right: w[1].p_alpha });
        }
    }
    for (i, p) in a.points.iter().enumerate() {
        for q in &a.points[i + 1..] {
            let lo = p.p_minus.max(q.p_minus);
            let hi = p.p_plus.min(q.p_plus);
            if lo < hi && !near(lo, hi, REL_TOL) {
                violations.push(Violation::OverlappingPlateaus { left: p.p_alpha, right: q.p_alpha });
            }
        }
    }

    let open: Vec<(f64, f64)> = a.points.iter().filter(|p| p.p_minus < p.p_plus).map(|p| p.plateau()).collect();
    for &m in h.xs() {
        let c = h.eval(m);
        if h.slope_right_of(m) > 0.0 {
            // intervals (p-, m + eps) shrink to (L, m] with L = sup{q < m : H(q) > c}
            let l = land.last_above_left(m, c).unwrap_or(f64::NEG_INFINITY);
            if !open.iter().any(|&(lo, hi)| lo <= m && hi >= l) {
                violations.push(Violation::LowerCoverMissing { near: m });
            }
        }
        if h.slope_left_of(m) > 0.0 {
            // intervals (m - eps, p+) shrink to [m, R) with R = inf{q > m : H(q) < c}
            let r = land.first_below_right(m, c).unwrap_or(f64::INFINITY);
            if !open.iter().any(|&(lo, hi)| hi >= m && lo <= r) {
                violations.push(Violation::UpperCoverMissing { near: m });
            }
        }
    }
    if !open.iter().any(|&(_, hi)| hi == f64::INFINITY) {
        violations.push(Violation::NoUnboundedPlateau);
    }
    Ok(ValidationReport { violations })
}

/// Builds the `A`-limited flux `F_A`: the plateau level on every
/// `[p_alpha-, p_alpha+]` and `H` elsewhere.
pub fn build_flux(a: &SetLimiter, h: &PiecewiseLinear) -> Result<EffectiveFlux> {
    let report = validate_set_limiter(a, h)?;
    if !report.is_valid() {
        return Err(Error::InvalidLimiter(report.to_string()));
    }
    Ok(EffectiveFlux { flux: limited_flux(a, h)?, limiter: a.clone() })
}

fn limited_flux(a: &SetLimiter, h: &PiecewiseLinear) -> Result<PiecewiseLinear> {
    let plateaus: Vec<(f64, f64, f64)> = a.points.iter().map(|p| (p.p_minus, p.p_plus, p.level)).collect();
    let inside_open = |x: f64| plateaus.iter().any(|&(lo, hi, _)| x > lo && x < hi);
    let level_at = |x: f64| plateaus.iter().find(|&&(lo, hi, _)| x >= lo && x <= hi).map(|&(_, _, l)| l);

    let mut knots: Vec<f64> = h.xs().iter().copied().filter(|&x| !inside_open(x)).collect();
    for &(lo, hi, _) in &plateaus {
        knots.push(lo);
        if hi.is_finite() {
            knots.push(hi);
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|b, a| near(*a, *b, 1e-14));

    let pts: Vec<(f64, f64)> = knots.iter().map(|&x| (x, level_at(x).unwrap_or_else(|| h.eval(x)))).collect();
    let right = if plateaus.iter().any(|p| p.1 == f64::INFINITY) { 0.0 } else { h.right_slope() };
    Ok(PiecewiseLinear::new(pts, h.left_slope(), right)?.simplified())
}

/// Where `p` stands with respect to the two branches of the `A_F` definition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub point: LimiterPoint,
    /// `p- < p`, `F(p) >= H(p)` and no higher reachable level has `F >= H`.
    pub lower: bool,
    /// `p < p+`, `F(p) <= H(p)` and no lower reachable level has `F <= H`.
    pub upper: bool,
}

fn classify(land: &Landscape<'_>, f: &PiecewiseLinear, p: f64) -> Classification {
    let point = land.point(p);
    let c = point.level;
    let fp = f.eval(p);
    // Any violating q for the lower branch can be moved to the first point
    // right of p where H exceeds c; F is non-increasing, so it suffices to
    // compare F there with c. Symmetrically on the left for the upper branch.
    let lower = point.p_minus < p
        && ge(fp, c)
        && land.exit_right(p, c).is_none_or(|q| le(f.eval(q), c));
    let upper = point.p_plus > p
        && le(fp, c)
        && land.exit_left(p, c).is_none_or(|q| ge(f.eval(q), c));
    Classification { point, lower, upper }
}

/// Tests a single slope against the `A_F` definition.
pub fn classify_point(h: &PiecewiseLinear, f: &PiecewiseLinear, p: f64) -> Result<Classification> {
    require_coercive(h)?;
    require_admissible_flux(f)?;
    Ok(classify(&Landscape::new(h), f, p))
}

fn candidate_slopes(h: &PiecewiseLinear, f: &PiecewiseLinear) -> Vec<f64> {
    let mut c: Vec<f64> = h.xs().iter().chain(f.xs()).copied().chain(crossings(f, h)).collect();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

// Points sharing a plateau collapse to the representative of smallest |p|.
fn dedup_plateaus(mut pts: Vec<LimiterPoint>) -> SetLimiter {
    let mut out: Vec<LimiterPoint> = Vec::with_capacity(pts.len());
    pts.sort_by(|a, b| a.p_minus.total_cmp(&b.p_minus));
    for pt in pts {
        match out.iter_mut().find(|q| q.same_plateau(&pt)) {
            Some(q) if pt.p_alpha.abs() < q.p_alpha.abs() => *q = pt,
            Some(_) => {}
            None => out.push(pt),
        }
    }
    SetLimiter::from_records(out)
}

/// The set limiter `A_F` of a continuous, non-increasing, semi-coercive `F`.
///
/// Only knots of `H` and `F` and crossings of `F` with `H` can belong to
/// `A_F`: strictly inside a segment where `H` rises, `F - H` is strictly
/// decreasing and a point with `F != H` fails one of the two branches.
pub fn compute_set_limiter(h: &PiecewiseLinear, f: &PiecewiseLinear) -> Result<SetLimiter> {
    require_coercive(h)?;
    require_admissible_flux(f)?;
    let land = Landscape::new(h);
    let members = candidate_slopes(h, f)
        .into_iter()
        .map(|p| classify(&land, f, p))
        .filter(|c| c.lower || c.upper)
        .map(|c| c.point)
        .collect();
    Ok(dedup_plateaus(members))
}

/// The limiter `A_0` of the state-constraint problem: slopes with
/// `p- = p < p+` at which `H` attains its running minimum from the left.
pub fn compute_a0(h: &PiecewiseLinear) -> Result<SetLimiter> {
    require_coercive(h)?;
    let land = Landscape::new(h);
    let members = h
        .xs()
        .iter()
        .map(|&p| land.point(p))
        .filter(|pt| pt.p_minus == pt.p_alpha && pt.p_plus > pt.p_alpha)
        .filter(|pt| land.exit_left(pt.p_alpha, pt.level).is_none())
        .collect();
    Ok(dedup_plateaus(members))
}

/// The effective boundary flux `F_{A_F}` of a relaxed boundary condition `F`.
pub fn effective_flux(h: &PiecewiseLinear, f: &PiecewiseLinear) -> Result<EffectiveFlux> {
    let limiter = compute_set_limiter(h, f)?;
    let flux = limited_flux(&limiter, h)?;
    Ok(EffectiveFlux { flux, limiter })
}

/// Sample abscissae covering every knot and plateau endpoint with a margin.
pub fn sample_window(fns: &[&PiecewiseLinear], limiter: Option<&SetLimiter>, n: usize) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for f in fns {
        lo = lo.min(f.first_x());
        hi = hi.max(f.last_x());
    }
    if let Some(a) = limiter {
        for p in a.points() {
            lo = lo.min(p.p_minus);
            if p.p_plus.is_finite() {
                hi = hi.max(p.p_plus);
            }
        }
    }
    let pad = 1.0 + 0.5 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// First sample where `min(F, H) <= F_A <= max(F, H)` fails.
pub fn sandwich_violation(h: &PiecewiseLinear, f: &PiecewiseLinear, flux: &PiecewiseLinear, samples: &[f64]) -> Option<f64> {
    samples.iter().copied().find(|&p| {
        let (hp, fp, ap) = (h.eval(p), f.eval(p), flux.eval(p));
        !(ge(ap, hp.min(fp)) && le(ap, hp.max(fp)))
    })
}

/// First consecutive sample pair where `flux` increases, or where the
/// stored knots disagree with the interpolant.
pub fn monotonicity_violation(flux: &PiecewiseLinear, samples: &[f64]) -> Option<f64> {
    if !flux.is_non_increasing() {
        return flux
            .all_slopes()
            .iter()
            .position(|&s| s > 0.0)
            .map(|i| if i == 0 { flux.first_x() } else { flux.xs()[(i - 1).min(flux.len() - 1)] });
    }
    samples.windows(2).find(|w| flux.eval(w[1]) > flux.eval(w[0]) + VALUE_TOL).map(|w| w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h_w() -> PiecewiseLinear {
        PiecewiseLinear::new(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)], -1.0, 1.0).unwrap()
    }

    fn f_lin() -> PiecewiseLinear {
        PiecewiseLinear::affine(-1.0, 0.0)
    }

    fn v_shape() -> PiecewiseLinear {
        PiecewiseLinear::new(vec![(0.0, 0.0)], -1.0, 1.0).unwrap()
    }

    fn bounds(p: f64) -> (f64, f64) {
        let b = slope_bounds(&h_w(), p).unwrap();
        (b.p_minus, b.p_plus)
    }

    #[test]
    fn slope_bounds_on_w() {
        assert_eq!(bounds(0.0), (-2.0, 0.0));
        assert_eq!(bounds(-0.5), (-1.5, 0.5));
        assert_eq!(bounds(2.0), (0.0, f64::INFINITY));
        assert_eq!(bounds(3.0), (-3.0, f64::INFINITY));
        assert_eq!(bounds(1.0), (1.0, f64::INFINITY));
        assert_eq!(bounds(-1.0), (-1.0, 1.0));
        assert_eq!(bounds(-3.0), (-3.0, -3.0));
    }

    #[test]
    fn slope_bounds_flat_segment() {
        // flat top on [0, 1]: interior points get p- = p = p+
        let h = PiecewiseLinear::new(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 0.0)], -1.0, 1.0).unwrap();
        let b = slope_bounds(&h, 0.5).unwrap();
        assert_eq!((b.p_minus, b.p_plus), (0.5, 0.5));
        let b = slope_bounds(&h, 0.0).unwrap();
        assert_eq!((b.p_minus, b.p_plus), (-2.0, 0.0));
        let b = slope_bounds(&h, 1.0).unwrap();
        assert_eq!((b.p_minus, b.p_plus), (1.0, 1.0));
    }

    #[test]
    fn slope_bounds_needs_coercive() {
        assert!(matches!(slope_bounds(&f_lin(), 0.0), Err(Error::NotCoercive)));
    }

    #[test]
    fn worked_example_limiter() {
        let a = compute_set_limiter(&h_w(), &f_lin()).unwrap();
        let pts = a.points();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0], LimiterPoint { p_alpha: -0.5, p_minus: -1.5, p_plus: 0.5, level: 0.5 });
        assert_eq!(pts[1], LimiterPoint { p_alpha: 1.0, p_minus: 1.0, p_plus: f64::INFINITY, level: 0.0 });
    }

    #[test]
    fn worked_example_flux() {
        let e = effective_flux(&h_w(), &f_lin()).unwrap();
        let want = |p: f64| {
            if p <= -1.5 {
                -p - 1.0
            } else if p <= 0.5 {
                0.5
            } else if p <= 1.0 {
                1.0 - p
            } else {
                0.0
            }
        };
        for k in -400..=400 {
            let p = k as f64 / 100.0;
            assert_abs_diff_eq!(e.flux.eval(p), want(p), epsilon = 1e-14);
        }
    }

    #[test]
    fn validate_examples() {
        let h = h_w();
        let good = SetLimiter::from_points(&h, &[-0.5, 1.0]).unwrap();
        assert!(validate_set_limiter(&good, &h).unwrap().is_valid());

        let partial = SetLimiter::from_points(&h, &[1.0]).unwrap();
        let report = validate_set_limiter(&partial, &h).unwrap();
        assert!(report.covering_violated(), "{report}");

        let empty = SetLimiter::default();
        let report = validate_set_limiter(&empty, &v_shape()).unwrap();
        assert!(report.covering_violated());
        assert!(report.violations.contains(&Violation::NoUnboundedPlateau));
    }

    #[test]
    fn validate_rejects_increasing_levels_and_bad_records() {
        let h = h_w();
        // -1/2 (level 1/2) and 0.5 ... pick -0.25 (level 0.75) to the right of -0.5
        let a = SetLimiter::from_points(&h, &[-0.5, -0.25, 1.0]).unwrap();
        let report = validate_set_limiter(&a, &h).unwrap();
        assert!(report.violations.iter().any(|v| matches!(v, Violation::LevelsIncreasing { .. })));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::OverlappingPlateaus { .. })));

        let tampered = SetLimiter::from_records(vec![
            LimiterPoint { p_alpha: -0.5, p_minus: -1.5, p_plus: 0.5, level: 0.6 },
            LimiterPoint { p_alpha: 1.0, p_minus: 1.0, p_plus: f64::INFINITY, level: 0.0 },
        ]);
        let report = validate_set_limiter(&tampered, &h).unwrap();
        assert!(matches!(report.violations[0], Violation::InconsistentRecord { .. }));
    }

    #[test]
    fn degenerate_plateau_is_rejected() {
        let h = h_w();
        let a = SetLimiter::from_points(&h, &[-3.0, -0.5, 1.0]).unwrap();
        let report = validate_set_limiter(&a, &h).unwrap();
        assert!(report.violations.contains(&Violation::DegeneratePlateau { p_alpha: -3.0 }));
        assert!(build_flux(&a, &h).is_err());
    }

    #[test]
    fn a0_of_w_and_v() {
        let a = compute_a0(&h_w()).unwrap();
        let pts = a.points();
        assert_eq!(pts.len(), 2);
        assert_eq!((pts[0].p_alpha, pts[0].p_minus, pts[0].p_plus, pts[0].level), (-1.0, -1.0, 1.0, 0.0));
        assert_eq!((pts[1].p_alpha, pts[1].p_minus, pts[1].p_plus, pts[1].level), (1.0, 1.0, f64::INFINITY, 0.0));

        let a = compute_a0(&v_shape()).unwrap();
        assert_eq!(a.points(), &[LimiterPoint { p_alpha: 0.0, p_minus: 0.0, p_plus: f64::INFINITY, level: 0.0 }]);
    }

    #[test]
    fn limiter_of_envelope_is_a0() {
        let h = h_w();
        let env = h.decreasing_envelope().unwrap();
        let a = compute_set_limiter(&h, &env).unwrap();
        assert!(a.approx_eq(&compute_a0(&h).unwrap(), 1e-12));
        let flux = build_flux(&a, &h).unwrap().flux;
        for k in -500..=500 {
            let p = k as f64 / 100.0;
            assert_abs_diff_eq!(flux.eval(p), env.eval(p), epsilon = 1e-12);
        }
    }

    #[test]
    fn flux_far_above_h() {
        // F - H changes sign only on the right tail, at p = 5.5
        let f = f_lin().shifted(10.0);
        let a = compute_set_limiter(&h_w(), &f).unwrap();
        assert_eq!(a.points(), &[LimiterPoint { p_alpha: 5.5, p_minus: -5.5, p_plus: f64::INFINITY, level: 4.5 }]);
    }

    #[test]
    fn same_sign_pattern_same_limiter() {
        // passes through (-1/2, 1/2) like F_lin, steeper on the left, flatter on the right
        let f_tilde = PiecewiseLinear::new(vec![(-0.5, 0.5)], -3.0, -0.5).unwrap();
        let a = compute_set_limiter(&h_w(), &f_lin()).unwrap();
        let b = compute_set_limiter(&h_w(), &f_tilde).unwrap();
        assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn classification_of_w_points() {
        // F = H at the crossing, so both branches hold
        let c = classify_point(&h_w(), &f_lin(), -0.5).unwrap();
        assert!(c.lower && c.upper);
        let c = classify_point(&h_w(), &f_lin().shifted(10.0), 5.5).unwrap();
        assert!(c.lower);
        let c = classify_point(&h_w(), &f_lin(), 1.0).unwrap();
        assert!(!c.lower && c.upper);
        let c = classify_point(&h_w(), &f_lin(), -0.7).unwrap();
        assert!(!c.lower && !c.upper);
    }

    #[test]
    fn inadmissible_flux_is_rejected() {
        assert!(matches!(compute_set_limiter(&h_w(), &h_w()), Err(Error::InadmissibleFlux(_))));
        let rising_left = PiecewiseLinear::affine(0.0, 1.0);
        assert!(compute_set_limiter(&h_w(), &rising_left).is_err());
        assert!(matches!(compute_set_limiter(&f_lin(), &f_lin()), Err(Error::NotCoercive)));
    }

    #[test]
    fn limiter_csv_round_trip() {
        let a = compute_set_limiter(&h_w(), &f_lin()).unwrap();
        let back = SetLimiter::from_csv_str(&a.to_csv()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn sandwich_on_worked_example() {
        let (h, f) = (h_w(), f_lin());
        let e = effective_flux(&h, &f).unwrap();
        let xs = sample_window(&[&h, &f], Some(&e.limiter), 10_000);
        assert_eq!(sandwich_violation(&h, &f, &e.flux, &xs), None);
        assert_eq!(monotonicity_violation(&e.flux, &xs), None);
        let broken = e.flux.shifted(0.7);
        assert!(sandwich_violation(&h, &f, &broken, &xs).is_some());
    }
}
