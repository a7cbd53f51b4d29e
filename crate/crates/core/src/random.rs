//! Seeded random instances for property tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pwl::PiecewiseLinear;

const SPAN: f64 = 5.0;
const MIN_GAP: f64 = 0.05;

/// Reproducible generator of piecewise-linear hamiltonians and fluxes with
/// 3 to 9 knots in `[-5, 5]` and values in `[-5, 5]`.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    fn knots(&mut self) -> Vec<f64> {
        let n = self.rng.gen_range(3..=9);
        loop {
            let mut xs: Vec<f64> = (0..n).map(|_| self.rng.gen_range(-SPAN..SPAN)).collect();
            xs.sort_by(f64::total_cmp);
            if xs.windows(2).all(|w| w[1] - w[0] >= MIN_GAP) {
                return xs;
            }
        }
    }

    /// Coercive `H`: arbitrary knot values, left tail slope in `[-3, -0.5]`,
    /// right tail slope in `[0.5, 3]`.
    pub fn coercive_hamiltonian(&mut self) -> PiecewiseLinear {
        let xs = self.knots();
        let pts = xs.into_iter().map(|x| (x, self.rng.gen_range(-SPAN..SPAN))).collect();
        let left = -self.rng.gen_range(0.5..3.0);
        let right = self.rng.gen_range(0.5..3.0);
        PiecewiseLinear::new(pts, left, right).expect("sorted distinct knots")
    }

    /// Non-increasing, semi-coercive `F`; about one segment in five is flat.
    pub fn boundary_flux(&mut self) -> PiecewiseLinear {
        let xs = self.knots();
        let mut ys: Vec<f64> = (0..xs.len()).map(|_| self.rng.gen_range(-SPAN..SPAN)).collect();
        ys.sort_by(|a, b| b.total_cmp(a));
        for i in 1..ys.len() {
            if self.rng.gen_bool(0.2) {
                ys[i] = ys[i - 1];
            }
        }
        let left = -self.rng.gen_range(0.5..3.0);
        let right = -self.rng.gen_range(0.1..3.0);
        PiecewiseLinear::new(xs.into_iter().zip(ys).collect(), left, right).expect("sorted distinct knots")
    }

    /// Strictly decreasing `F` with `F(0) = 0` and both tails decreasing.
    pub fn admissible_flux(&mut self) -> PiecewiseLinear {
        let xs = self.knots();
        let mut pts = Vec::with_capacity(xs.len());
        let mut y = 0.0;
        let mut prev = None;
        for x in xs {
            if let Some(px) = prev {
                y -= self.rng.gen_range(0.1..3.0) * (x - px);
            }
            pts.push((x, y));
            prev = Some(x);
        }
        let f = PiecewiseLinear::new(pts, -self.rng.gen_range(0.1..3.0), -self.rng.gen_range(0.1..3.0))
            .expect("sorted distinct knots");
        f.shifted(-f.eval(0.0))
    }

    /// Uniform samples in `[lo, hi)`.
    pub fn samples(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.rng.gen_range(lo..hi)).collect()
    }
}
