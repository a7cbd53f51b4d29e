//! Continuous piecewise-linear functions on the whole real line.
//!
//! A [`PiecewiseLinear`] is stored as a strictly increasing list of knots
//! `(p, value)` plus the slopes of the two linear tails. Between knots the
//! function is the linear interpolant, so continuity holds by construction.
//! Every scalar function in the crate (hamiltonians, boundary fluxes,
//! envelopes, limited fluxes) uses this representation.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

/// Relative tolerance for comparing derived quantities (levels, endpoints).
pub const REL_TOL: f64 = 1e-9;

/// Tolerance used when deciding whether a difference of two function values
/// is zero. Values computed by interpolation carry a few ulps of noise.
pub(crate) const ZERO_TOL: f64 = 1e-12;

pub(crate) fn near(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// A continuous piecewise-linear function with linear tails.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

impl PiecewiseLinear {
    /// Builds a function from knots and tail slopes.
    ///
    /// Knots must be finite with strictly increasing abscissae.
    pub fn new(points: Vec<(f64, f64)>, left_slope: f64, right_slope: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidBreakpoints("at least one breakpoint is required".into()));
        }
        if !left_slope.is_finite() || !right_slope.is_finite() {
            return Err(Error::InvalidBreakpoints("tail slopes must be finite".into()));
        }
        for (i, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidBreakpoints(format!("breakpoint {i} is not finite")));
            }
            if i > 0 && points[i - 1].0 >= x {
                return Err(Error::InvalidBreakpoints(format!(
                    "breakpoints must be strictly increasing (p[{}] = {} >= p[{}] = {})",
                    i - 1,
                    points[i - 1].0,
                    i,
                    x
                )));
            }
        }
        let (xs, ys) = points.into_iter().unzip();
        Ok(Self { xs, ys, left_slope, right_slope })
    }

    /// The affine function `p -> slope * p + intercept`.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self { xs: vec![0.0], ys: vec![intercept], left_slope: slope, right_slope: slope }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn left_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_slope(&self) -> f64 {
        self.right_slope
    }

    pub fn first_x(&self) -> f64 {
        self.xs[0]
    }

    pub fn last_x(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Value of the function at `p`.
    pub fn eval(&self, p: f64) -> f64 {
        let n = self.xs.len();
        if p <= self.xs[0] {
            return self.ys[0] + self.left_slope * (p - self.xs[0]);
        }
        if p >= self.xs[n - 1] {
            return self.ys[n - 1] + self.right_slope * (p - self.xs[n - 1]);
        }
        let i = self.xs.partition_point(|&x| x <= p);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        if p == x0 {
            return y0;
        }
        y0 + (y1 - y0) * ((p - x0) / (x1 - x0))
    }

    /// Slopes of the interior segments, left to right.
    pub fn segment_slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect()
    }

    /// All slopes: left tail, interior segments, right tail.
    pub fn all_slopes(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.xs.len() + 1);
        s.push(self.left_slope);
        s.extend(self.segment_slopes());
        s.push(self.right_slope);
        s
    }

    /// Slope of the piece immediately to the left of `p`.
    pub fn slope_left_of(&self, p: f64) -> f64 {
        let i = self.xs.partition_point(|&x| x < p);
        if i == 0 {
            self.left_slope
        } else if i == self.xs.len() {
            self.right_slope
        } else {
            (self.ys[i] - self.ys[i - 1]) / (self.xs[i] - self.xs[i - 1])
        }
    }

    /// Slope of the piece immediately to the right of `p`.
    pub fn slope_right_of(&self, p: f64) -> f64 {
        let i = self.xs.partition_point(|&x| x <= p);
        if i == self.xs.len() {
            self.right_slope
        } else if i == 0 {
            self.left_slope
        } else {
            (self.ys[i] - self.ys[i - 1]) / (self.xs[i] - self.xs[i - 1])
        }
    }

    /// Largest absolute slope over pieces meeting `[a, b]`.
    pub fn lipschitz_on(&self, a: f64, b: f64) -> f64 {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let mut lip = self.slope_right_of(a).abs().max(self.slope_left_of(b).abs());
        if a < self.xs[0] {
            lip = lip.max(self.left_slope.abs());
        }
        if b > self.last_x() {
            lip = lip.max(self.right_slope.abs());
        }
        for (k, s) in self.segment_slopes().into_iter().enumerate() {
            if self.xs[k] < b && self.xs[k + 1] > a {
                lip = lip.max(s.abs());
            }
        }
        lip
    }

    /// Global Lipschitz constant (largest absolute slope).
    pub fn lipschitz(&self) -> f64 {
        self.all_slopes().into_iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// `H(p) -> +inf` as `|p| -> inf`.
    pub fn is_coercive(&self) -> bool {
        self.left_slope < 0.0 && self.right_slope > 0.0
    }

    /// `F(p) -> +inf` as `p -> -inf`.
    pub fn is_semicoercive(&self) -> bool {
        self.left_slope < 0.0
    }

    pub fn is_non_increasing(&self) -> bool {
        self.all_slopes().iter().all(|&s| s <= 0.0)
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.all_slopes().iter().all(|&s| s < 0.0)
    }

    fn monotone_direction(&self) -> Option<bool> {
        let slopes = self.all_slopes();
        if slopes.iter().all(|&s| s > 0.0) {
            Some(true)
        } else if slopes.iter().all(|&s| s < 0.0) {
            Some(false)
        } else {
            None
        }
    }

    /// Solves `f(p) = y` for a strictly monotone `f`.
    ///
    /// The segment containing `y` is located by bisection on the knot values
    /// and the linear equation on it is solved directly.
    pub fn inverse_monotone(&self, y: f64) -> Result<f64> {
        let increasing = self.monotone_direction().ok_or(Error::NotMonotone)?;
        Ok(self.inverse_unchecked(y, increasing))
    }

    fn inverse_unchecked(&self, y: f64, increasing: bool) -> f64 {
        let n = self.xs.len();
        let (first, last) = (self.ys[0], self.ys[n - 1]);
        let below_first = if increasing { y <= first } else { y >= first };
        if below_first {
            return self.xs[0] + (y - first) / self.left_slope;
        }
        let beyond_last = if increasing { y >= last } else { y <= last };
        if beyond_last {
            return self.xs[n - 1] + (y - last) / self.right_slope;
        }
        let i = if increasing {
            self.ys.partition_point(|&v| v <= y)
        } else {
            self.ys.partition_point(|&v| v >= y)
        };
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        if y == y0 {
            return x0;
        }
        x0 + (x1 - x0) * ((y - y0) / (y1 - y0))
    }

    /// The inverse function of a strictly monotone `f`, as a piecewise-linear
    /// function of the value variable.
    pub fn inverse(&self) -> Result<Self> {
        let increasing = self.monotone_direction().ok_or(Error::NotMonotone)?;
        let mut pts: Vec<(f64, f64)> = self.breakpoints().map(|(x, y)| (y, x)).collect();
        let (left, right) = if increasing {
            (1.0 / self.left_slope, 1.0 / self.right_slope)
        } else {
            pts.reverse();
            (1.0 / self.right_slope, 1.0 / self.left_slope)
        };
        Self::new(pts, left, right)
    }

    /// `p -> -f(-p)`.
    pub fn reflect(&self) -> Self {
        let xs = self.xs.iter().rev().map(|x| -x).collect();
        let ys = self.ys.iter().rev().map(|y| -y).collect();
        Self { xs, ys, left_slope: self.right_slope, right_slope: self.left_slope }
    }

    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.ys.iter_mut().for_each(|y| *y += c);
        out
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|y| k * y).collect(),
            left_slope: k * self.left_slope,
            right_slope: k * self.right_slope,
        }
    }

    /// Pointwise linear combination `a*f + b*g` on the merged knot set.
    pub fn combine(f: &Self, a: f64, g: &Self, b: f64) -> Self {
        let xs = merged_knots(&f.xs, &g.xs);
        let ys = xs.iter().map(|&x| a * f.eval(x) + b * g.eval(x)).collect();
        Self {
            xs,
            ys,
            left_slope: a * f.left_slope + b * g.left_slope,
            right_slope: a * f.right_slope + b * g.right_slope,
        }
    }

    /// Drops knots that are collinear with their neighbours (and with the
    /// adjacent tail for the outermost knots).
    pub fn simplified(&self) -> Self {
        let slope_tol = 1e-12;
        let same = |a: f64, b: f64| near(a, b, slope_tol);
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(self.xs.len());
        for (x, y) in self.breakpoints() {
            if let Some(&(px, _)) = pts.last() {
                if near(px, x, 1e-14) {
                    continue;
                }
            }
            pts.push((x, y));
        }
        let mut changed = true;
        while changed && pts.len() > 1 {
            changed = false;
            let n = pts.len();
            let mut keep = vec![true; n];
            for i in 0..n {
                let before = if i == 0 {
                    self.left_slope
                } else {
                    (pts[i].1 - pts[i - 1].1) / (pts[i].0 - pts[i - 1].0)
                };
                let after = if i == n - 1 {
                    self.right_slope
                } else {
                    (pts[i + 1].1 - pts[i].1) / (pts[i + 1].0 - pts[i].0)
                };
                if same(before, after) && (i == 0 || keep[i - 1]) {
                    keep[i] = false;
                    changed = true;
                }
            }
            if keep.iter().all(|k| !k) {
                keep[0] = true;
            }
            pts = pts.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect();
        }
        let (xs, ys) = pts.into_iter().unzip();
        Self { xs, ys, left_slope: self.left_slope, right_slope: self.right_slope }
    }

    /// Running infimum from the left, `p -> inf_{q <= p} f(q)`.
    pub fn decreasing_envelope(&self) -> Result<Self> {
        if self.left_slope > 0.0 {
            return Err(Error::Unbounded);
        }
        let (pts, tail) = running_min_from(self, self.xs[0]);
        Ok(Self::new(pts, self.left_slope, tail)?.simplified())
    }

    /// Boundary flux of Bardos-LeRoux-Nedelec type anchored at `p0`:
    /// `sup_{[p, p0]} H` for `p <= p0` and `inf_{[p0, p]} H` for `p >= p0`.
    pub fn bln_flux(&self, p0: f64) -> Result<Self> {
        if !self.is_coercive() {
            return Err(Error::NotCoercive);
        }
        let (right, right_tail) = running_min_from(self, p0);
        let reflected = self.reflect();
        let (left_r, left_tail) = running_min_from(&reflected, -p0);
        let mut pts: Vec<(f64, f64)> = left_r.iter().rev().map(|&(x, y)| (-x, -y)).collect();
        // both halves start at (p0, H(p0))
        pts.pop();
        pts.extend(right);
        // the reflected half may sit one ulp off the anchor value
        for i in 1..pts.len() {
            pts[i].1 = pts[i].1.min(pts[i - 1].1);
        }
        Ok(Self::new(pts, left_tail, right_tail)?.simplified())
    }

    /// Serializes to the `p,value` CSV format with tail-slope metadata lines.
    ///
    /// Numbers use the shortest representation that parses back to the same
    /// `f64`, so a write/read cycle is exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# left_tail_slope={}", self.left_slope);
        let _ = writeln!(out, "# right_tail_slope={}", self.right_slope);
        out.push_str("p,value\n");
        for (x, y) in self.breakpoints() {
            let _ = writeln!(out, "{x},{y}");
        }
        out
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut left = None;
        let mut right = None;
        let mut header_seen = false;
        let mut pts = Vec::new();
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = lineno + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((key, value)) = meta.trim().split_once('=') {
                    let v: f64 = value.trim().parse().map_err(|_| {
                        Error::Csv(format!("line {lineno}: bad number `{}`", value.trim()))
                    })?;
                    match key.trim() {
                        "left_tail_slope" => left = Some(v),
                        "right_tail_slope" => right = Some(v),
                        _ => {}
                    }
                }
                continue;
            }
            if !header_seen {
                let cols: Vec<_> = line.split(',').map(str::trim).collect();
                if cols != ["p", "value"] {
                    return Err(Error::Csv(format!("line {lineno}: expected header `p,value`")));
                }
                header_seen = true;
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Csv(format!("line {lineno}: expected two columns")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Csv(format!("line {lineno}: bad number `{}`", s.trim())))
            };
            pts.push((parse(a)?, parse(b)?));
        }
        let left = left.ok_or_else(|| Error::Csv("missing `# left_tail_slope=` line".into()))?;
        let right = right.ok_or_else(|| Error::Csv("missing `# right_tail_slope=` line".into()))?;
        Self::new(pts, left, right)
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::from_csv_reader(s.as_bytes())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

fn merged_knots(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut xs: Vec<f64> = a.iter().chain(b).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Knots of `x -> min_{[start, x]} f` for `x >= start`, and its right tail slope.
fn running_min_from(f: &PiecewiseLinear, start: f64) -> (Vec<(f64, f64)>, f64) {
    let mut pts = vec![(start, f.eval(start))];
    let (mut a, mut va) = (start, f.eval(start));
    let mut m = va;
    let mut following = true;
    for (b, vb) in f.breakpoints().filter(|&(x, _)| x > start) {
        if following {
            if vb < va {
                pts.push((b, vb));
                m = vb;
            } else {
                following = false;
            }
        } else if vb < m {
            let x = a + (m - va) / (vb - va) * (b - a);
            pts.push((x.max(a), m));
            pts.push((b, vb));
            m = vb;
            following = true;
        }
        a = b;
        va = vb;
    }
    let s = f.right_slope;
    let tail = if s < 0.0 {
        if !following {
            let x = a + (m - va) / s;
            pts.push((x.max(a), m));
        }
        s
    } else {
        0.0
    };
    dedup_close(&mut pts);
    (pts, tail)
}

fn dedup_close(pts: &mut Vec<(f64, f64)>) {
    pts.dedup_by(|b, a| near(a.0, b.0, 1e-14));
}

/// Points where `f - g` changes sign or vanishes, sorted ascending.
///
/// A segment on which the two functions coincide contributes both of its
/// endpoints. Tails contribute at most one transversal root each.
pub fn crossings(f: &PiecewiseLinear, g: &PiecewiseLinear) -> Vec<f64> {
    let d = PiecewiseLinear::combine(f, 1.0, g, -1.0);
    let scale: Vec<f64> = d.xs.iter().map(|&x| 1.0 + f.eval(x).abs() + g.eval(x).abs()).collect();
    let is_zero = |i: usize| d.ys[i].abs() <= ZERO_TOL * scale[i];
    let n = d.xs.len();
    let mut out = Vec::new();

    let (x0, d0) = (d.xs[0], d.ys[0]);
    if !is_zero(0) && d.left_slope != 0.0 && d0 / d.left_slope > 0.0 {
        out.push(x0 - d0 / d.left_slope);
    }
    for i in 0..n {
        if is_zero(i) {
            out.push(d.xs[i]);
        }
        if i + 1 < n && !is_zero(i) && !is_zero(i + 1) && (d.ys[i] < 0.0) != (d.ys[i + 1] < 0.0) {
            let (xa, xb, ya, yb) = (d.xs[i], d.xs[i + 1], d.ys[i], d.ys[i + 1]);
            out.push(xa + (xb - xa) * (ya / (ya - yb)));
        }
    }
    let (xn, dn) = (d.xs[n - 1], d.ys[n - 1]);
    if !is_zero(n - 1) && d.right_slope != 0.0 && dn / d.right_slope < 0.0 {
        out.push(xn - dn / d.right_slope);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
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

    #[test]
    fn eval_examples() {
        assert_eq!(h_w().eval(0.0), 1.0);
        assert_eq!(h_w().eval(-3.0), 2.0);
        assert_eq!(h_w().eval(0.5), 0.5);
        assert_eq!(f_lin().eval(7.0), -7.0);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(PiecewiseLinear::new(vec![], 0.0, 0.0).is_err());
        assert!(PiecewiseLinear::new(vec![(1.0, 0.0), (1.0, 2.0)], 0.0, 0.0).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, f64::NAN)], 0.0, 0.0).is_err());
    }

    #[test]
    fn inverse_of_linear_flux() {
        assert_eq!(f_lin().inverse_monotone(3.0).unwrap(), -3.0);
        assert_eq!(f_lin().inverse_monotone(0.0).unwrap(), 0.0);
        assert!(matches!(h_w().inverse_monotone(0.5), Err(Error::NotMonotone)));
    }

    #[test]
    fn inverse_function_matches_point_inverse() {
        let f = PiecewiseLinear::new(vec![(-1.0, 2.0), (0.0, 0.0), (2.0, -1.0)], -3.0, -0.25).unwrap();
        let inv = f.inverse().unwrap();
        for k in -40..=40 {
            let y = k as f64 * 0.25;
            assert_abs_diff_eq!(inv.eval(y), f.inverse_monotone(y).unwrap(), epsilon = 1e-12);
            assert_abs_diff_eq!(f.eval(inv.eval(y)), y, epsilon = 1e-12);
        }
    }

    #[test]
    fn flat_segment_is_not_monotone() {
        let f = PiecewiseLinear::new(vec![(0.0, 1.0), (1.0, 1.0)], -1.0, -1.0).unwrap();
        assert!(f.inverse_monotone(0.0).is_err());
    }

    #[test]
    fn crossings_w_and_linear() {
        // F - H = 1 on the left tail, -2p - 1 on [-1, 0], -1 on [0, 1], 1 - 2p on the right tail
        assert_eq!(crossings(&f_lin(), &h_w()), vec![-0.5]);
    }

    #[test]
    fn crossings_degenerate_and_parallel() {
        assert_eq!(crossings(&h_w(), &h_w()), vec![-1.0, 0.0, 1.0]);
        assert!(crossings(&f_lin(), &f_lin().shifted(1.0)).is_empty());
    }

    #[test]
    fn crossings_on_tails() {
        let v = PiecewiseLinear::new(vec![(0.0, 0.0)], -1.0, 1.0).unwrap();
        let c = crossings(&v, &PiecewiseLinear::affine(0.0, 2.0));
        assert_eq!(c, vec![-2.0, 2.0]);
    }

    #[test]
    fn coercivity_checks() {
        assert!(h_w().is_coercive());
        assert!(!f_lin().is_coercive());
        assert!(f_lin().is_semicoercive());
    }

    #[test]
    fn envelope_of_w() {
        let e = h_w().decreasing_envelope().unwrap();
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(-3.0), 2.0);
        assert_eq!(e.eval(-1.0), 0.0);
        assert_eq!(e.eval(10.0), 0.0);
        assert_eq!(e.right_slope(), 0.0);
        assert_eq!(f_lin().decreasing_envelope().unwrap(), f_lin());
    }

    #[test]
    fn envelope_requires_bounded_left_tail() {
        let f = PiecewiseLinear::affine(1.0, 0.0);
        assert!(matches!(f.decreasing_envelope(), Err(Error::Unbounded)));
    }

    #[test]
    fn bln_flux_of_w() {
        let f = h_w().bln_flux(0.0).unwrap();
        for &(p, want) in &[(-3.0, 2.0), (-2.0, 1.0), (-1.5, 1.0), (-0.5, 1.0), (0.0, 1.0), (0.5, 0.5), (1.0, 0.0), (4.0, 0.0)] {
            assert_abs_diff_eq!(f.eval(p), want, epsilon = 1e-15);
        }
        assert!(f.is_non_increasing());
    }

    #[test]
    fn bln_flux_anchor_value() {
        let h = h_w();
        for &p0 in &[-2.0, -0.3, 0.0, 0.7, 3.0] {
            assert_eq!(h.bln_flux(p0).unwrap().eval(p0), h.eval(p0));
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = PiecewiseLinear::new(vec![(-1.0 / 3.0, 0.1), (0.2, 1e-17)], -1.5, 2.0 / 3.0).unwrap();
        let back = PiecewiseLinear::from_csv_str(&f.to_csv()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn csv_errors() {
        assert!(PiecewiseLinear::from_csv_str("p,value\n0,0\n").is_err());
        assert!(PiecewiseLinear::from_csv_str("# left_tail_slope=1\n# right_tail_slope=1\nx,y\n").is_err());
        assert!(PiecewiseLinear::from_csv_str("# left_tail_slope=1\n# right_tail_slope=1\np,value\n0,zz\n").is_err());
    }

    #[test]
    fn simplify_removes_collinear_knots() {
        let f = PiecewiseLinear::new(vec![(-1.0, 1.0), (0.0, 0.0), (1.0, -1.0)], -1.0, -1.0).unwrap();
        let s = f.simplified();
        assert_eq!(s.len(), 1);
        for k in -5..=5 {
            assert_eq!(s.eval(k as f64), -(k as f64));
        }
    }

    #[test]
    fn lipschitz_on_subinterval() {
        let h = PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 3.0)], -1.0, 0.5).unwrap();
        assert_eq!(h.lipschitz_on(-5.0, -1.0), 1.0);
        assert_eq!(h.lipschitz_on(-1.0, 0.5), 3.0);
        assert_eq!(h.lipschitz_on(2.0, 4.0), 0.5);
        assert_eq!(h.lipschitz(), 3.0);
    }

    #[test]
    fn slopes_around_points() {
        let h = h_w();
        assert_eq!(h.slope_left_of(-1.0), -1.0);
        assert_eq!(h.slope_right_of(-1.0), 1.0);
        assert_eq!(h.slope_left_of(0.5), -1.0);
        assert_eq!(h.slope_right_of(0.5), -1.0);
        assert_eq!(h.slope_right_of(1.0), 1.0);
        assert_eq!(h.slope_left_of(5.0), 1.0);
    }
}
