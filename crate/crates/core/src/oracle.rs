//! Brute-force grid evaluation of the `A_F` definition.
//!
//! Everything here works on sampled values only: slope bounds are found by
//! scanning the grid for the nearest sample at the same level, and the
//! quantified condition is checked against every other sample. It shares no
//! code with [`crate::limiter`] and exists to cross-check it.

use crate::error::{Error, Result};
use crate::limiter::{LimiterPoint, SetLimiter};
use crate::pwl::{crossings, PiecewiseLinear};

/// Sorted sample abscissae for the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    xs: Vec<f64>,
}

impl GridSpec {
    /// `lo, lo + step, ..., hi`.
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        let n = ((hi - lo) / step).round() as usize + 1;
        Self { xs: (0..n).map(|i| lo + i as f64 * step).collect() }
    }

    /// `n` samples over the knots of `H` and `F`, plus `n / 4` on each side
    /// reaching out to where `H` exceeds every level attained at knots and
    /// `F = H` crossings.
    pub fn auto(h: &PiecewiseLinear, f: &PiecewiseLinear, n: usize) -> Self {
        let knots: Vec<f64> = h.xs().iter().chain(f.xs()).copied().collect();
        let lo = knots.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
        let hi = knots.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let mut keys = knots;
        keys.extend(crossings(f, h));
        let top = keys.iter().map(|&p| h.eval(p)).fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let far_lo = keys.iter().copied().fold(lo, f64::min);
        let far_hi = keys.iter().copied().fold(hi, f64::max);
        let mut a = far_lo - 1.0;
        while h.eval(a) < top {
            a -= 1.0 + (far_lo - a);
        }
        let mut b = far_hi + 1.0;
        while h.eval(b) < top {
            b += 1.0 + (b - far_hi);
        }
        let line = |from: f64, to: f64, m: usize| (0..m).map(move |i| from + (to - from) * i as f64 / m as f64);
        let side = (n / 4).max(2);
        let mut xs: Vec<f64> = line(a, lo, side).chain(line(lo, hi, n - 1)).chain(line(hi, b, side)).collect();
        xs.push(b);
        Self { xs }
    }

    pub fn samples(&self) -> &[f64] {
        &self.xs
    }

    /// Largest sample spacing next to `x`.
    pub fn step_near(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&s| s < x).clamp(1, self.xs.len() - 1);
        let right = self.xs.get(i + 1).map_or(0.0, |&s| s - self.xs[i]);
        (self.xs[i] - self.xs[i - 1]).max(right)
    }
}

struct Sampled {
    x: Vec<f64>,
    h: Vec<f64>,
    f: Vec<f64>,
    minus: Vec<f64>,
    plus: Vec<f64>,
}

const TOL: f64 = 1e-12;

fn interpolate(x0: f64, x1: f64, v0: f64, v1: f64, c: f64) -> f64 {
    if v0 == v1 {
        x0
    } else {
        x0 + (c - v0) / (v1 - v0) * (x1 - x0)
    }
}

impl Sampled {
    fn new(h: &PiecewiseLinear, f: &PiecewiseLinear, grid: &GridSpec) -> Self {
        let x = grid.samples().to_vec();
        let hv: Vec<f64> = x.iter().map(|&p| h.eval(p)).collect();
        let fv: Vec<f64> = x.iter().map(|&p| f.eval(p)).collect();
        let n = x.len();
        let mut minus = vec![0.0; n];
        let mut plus = vec![0.0; n];
        for i in 0..n {
            let c = hv[i];
            minus[i] = match (0..i).rev().find(|&j| hv[j] >= c - TOL) {
                Some(j) if j + 1 == i => x[i],
                Some(j) => interpolate(x[j], x[j + 1], hv[j], hv[j + 1], c),
                None => x[i],
            };
            plus[i] = match (i + 1..n).find(|&j| hv[j] <= c + TOL) {
                Some(j) if j == i + 1 => x[i],
                Some(j) => interpolate(x[j - 1], x[j], hv[j - 1], hv[j], c),
                None => f64::INFINITY,
            };
        }
        Self { x, h: hv, f: fv, minus, plus }
    }

    fn meets(a: (f64, f64), b: (f64, f64)) -> bool {
        a.0.max(b.0) < a.1.min(b.1)
    }

    fn members(&self) -> Vec<usize> {
        let n = self.x.len();
        let mut above: Vec<usize> = (0..n).filter(|&q| self.f[q] >= self.h[q] - TOL).collect();
        let mut below: Vec<usize> = (0..n).filter(|&q| self.f[q] <= self.h[q] + TOL).collect();
        above.sort_by(|&a, &b| self.h[b].total_cmp(&self.h[a]));
        below.sort_by(|&a, &b| self.h[a].total_cmp(&self.h[b]));

        let lower = |p: usize| {
            let c = self.h[p];
            let window = (self.minus[p], self.x[p]);
            self.minus[p] < self.x[p]
                && self.f[p] >= c - TOL
                && above
                    .iter()
                    .take_while(|&&q| self.h[q] > c + TOL)
                    .all(|&q| !Self::meets((self.minus[q], self.plus[q]), window))
        };
        let upper = |p: usize| {
            let c = self.h[p];
            let window = (self.x[p], self.plus[p]);
            self.plus[p] > self.x[p]
                && self.f[p] <= c + TOL
                && below
                    .iter()
                    .take_while(|&&q| self.h[q] < c - TOL)
                    .all(|&q| !Self::meets((self.minus[q], self.plus[q]), window))
        };
        (0..n).filter(|&p| lower(p) || upper(p)).collect()
    }
}

/// Applies the `A_F` definition at every grid sample and clusters the
/// accepted samples by plateau.
///
/// Accepted samples at most three grid indices apart, or whose plateaus
/// agree within three local grid steps, form one cluster represented by its member of
/// smallest `|p|`.
pub fn oracle_set_limiter(h: &PiecewiseLinear, f: &PiecewiseLinear, grid: &GridSpec) -> Result<SetLimiter> {
    if !h.is_coercive() {
        return Err(Error::NotCoercive);
    }
    if !f.is_non_increasing() || !f.is_semicoercive() {
        return Err(Error::InadmissibleFlux("F must be non-increasing and semi-coercive".into()));
    }
    let s = Sampled::new(h, f, grid);
    let close = |a: f64, b: f64| a == b || (a - b).abs() <= 3.0 * grid.step_near(a);

    // (representative, last member index)
    let mut clusters: Vec<(LimiterPoint, usize)> = Vec::new();
    for i in s.members() {
        let pt = LimiterPoint { p_alpha: s.x[i], p_minus: s.minus[i], p_plus: s.plus[i], level: s.h[i] };
        let found = clusters
            .iter_mut()
            .find(|(c, last)| i - *last <= 3 || (close(c.p_minus, pt.p_minus) && close(c.p_plus, pt.p_plus)));
        match found {
            Some((c, last)) => {
                *last = i;
                if pt.p_alpha.abs() < c.p_alpha.abs() {
                    *c = pt;
                }
            }
            None => clusters.push((pt, i)),
        }
    }
    Ok(SetLimiter::from_records(clusters.into_iter().map(|(c, _)| c).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h_w() -> PiecewiseLinear {
        PiecewiseLinear::new(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)], -1.0, 1.0).unwrap()
    }

    #[test]
    fn oracle_on_worked_example() {
        let a = oracle_set_limiter(&h_w(), &PiecewiseLinear::affine(-1.0, 0.0), &GridSpec::new(-5.0, 5.0, 1e-3)).unwrap();
        let pts = a.points();
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!((pts[0].p_minus + 1.5).abs() < 2e-3 && (pts[0].p_plus - 0.5).abs() < 2e-3);
        assert!((pts[1].p_minus - 1.0).abs() < 2e-3 && pts[1].p_plus == f64::INFINITY);
    }

    #[test]
    fn oracle_on_envelope() {
        let h = h_w();
        let env = h.decreasing_envelope().unwrap();
        let a = oracle_set_limiter(&h, &env, &GridSpec::new(-5.0, 5.0, 1e-3)).unwrap();
        let pts = a.points();
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!((pts[0].p_minus + 1.0).abs() < 2e-3 && (pts[0].p_plus - 1.0).abs() < 2e-3);
        assert!((pts[1].p_minus - 1.0).abs() < 2e-3 && pts[1].p_plus == f64::INFINITY);
    }

    #[test]
    fn auto_window_contains_levels() {
        let h = h_w();
        let f = PiecewiseLinear::affine(-1.0, 10.0);
        let g = GridSpec::auto(&h, &f, 1001);
        let xs = g.samples();
        assert!(xs[0] <= -5.5 && xs[xs.len() - 1] >= 5.5);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(g.step_near(0.0) < 4.0 / 999.0);
    }
}
