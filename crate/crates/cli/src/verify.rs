//! The one-shot verification suite behind `hjhalf verify`.

use hjhalf_core::limiter::{
    compute_a0, compute_set_limiter, effective_flux, monotonicity_violation, sample_window, sandwich_violation,
    validate_set_limiter,
};
use hjhalf_core::presets::{preset, ADMISSIBLE_FLUXES};
use hjhalf_core::random::InstanceGenerator;
use hjhalf_core::solver::{check_ordering, compare_runs, solve, SchemeConfig};
use hjhalf_core::testfn::build_test_function;
use hjhalf_core::{Error, PiecewiseLinear};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::sig15;

/// Deliberate faults for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Sabotage {
    /// Raise the first effective flux by one before the sandwich check.
    Sandwich,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub instances: usize,
    pub passed: bool,
    pub failures: usize,
    pub properties: Vec<PropertyResult>,
}

fn record(id: &str, outcome: Result<String, String>) -> PropertyResult {
    match outcome {
        Ok(detail) => PropertyResult { id: id.into(), passed: true, detail },
        Err(detail) => PropertyResult { id: id.into(), passed: false, detail },
    }
}

fn pairs(cfg: &RunConfig) -> Vec<(String, PiecewiseLinear, PiecewiseLinear)> {
    let mut g = InstanceGenerator::new(cfg.seed);
    let mut out = vec![("configured pair".to_string(), cfg.hamiltonian.clone(), cfg.flux.clone())];
    out.extend((0..cfg.instances).map(|k| (format!("random pair {k}"), g.coercive_hamiltonian(), g.boundary_flux())));
    out
}

fn limiter_suite(cfg: &RunConfig, sabotage: Option<Sabotage>) -> Vec<PropertyResult> {
    let (mut sandwich, mut monotone, mut valid, mut idem) = (Ok(()), Ok(()), Ok(()), Ok(()));
    let all = pairs(cfg);
    for (k, (label, h, f)) in all.iter().enumerate() {
        let e = match effective_flux(h, f) {
            Ok(e) => e,
            Err(err) => {
                valid = valid.and(Err(format!("{label}: {err}")));
                continue;
            }
        };
        let xs = sample_window(&[h, f], Some(&e.limiter), 10_000);
        let mut flux = e.flux.clone();
        if k == 0 && sabotage == Some(Sabotage::Sandwich) {
            flux = PiecewiseLinear::new(flux.breakpoints().map(|(x, y)| (x, y + 1.0)).collect(), flux.left_slope(), flux.right_slope())
                .expect("shifted copy of a valid function");
        }
        if let Some(p) = sandwich_violation(h, f, &flux, &xs) {
            sandwich = sandwich.and(Err(format!("{label}: outside [min(F,H), max(F,H)] at p = {}", sig15(p))));
        }
        if let Some(p) = monotonicity_violation(&e.flux, &xs) {
            monotone = monotone.and(Err(format!("{label}: increases near p = {}", sig15(p))));
        }
        match validate_set_limiter(&e.limiter, h) {
            Ok(r) if r.is_valid() => {}
            Ok(r) => valid = valid.and(Err(format!("{label}: {r}"))),
            Err(err) => valid = valid.and(Err(format!("{label}: {err}"))),
        }
        match compute_set_limiter(h, &e.flux) {
            Ok(again) if again.approx_eq(&e.limiter, 1e-9) => {}
            Ok(_) => idem = idem.and(Err(format!("{label}: limiter of the effective flux differs"))),
            Err(err) => idem = idem.and(Err(format!("{label}: {err}"))),
        }
    }
    let n = all.len();
    let done = |r: Result<(), String>| r.map(|_| format!("{n} pairs at 10000 samples"));
    vec![
        record("limiter.idempotence", done(idem)),
        record("limiter.monotonicity", done(monotone)),
        record("limiter.sandwich", done(sandwich)),
        record("limiter.validity", done(valid)),
        record("limiter.state_constraint", state_constraint(cfg)),
        record("limiter.worked_example", worked_example()),
    ]
}

fn state_constraint(cfg: &RunConfig) -> Result<String, String> {
    let mut g = InstanceGenerator::new(cfg.seed ^ 0x5eed);
    let mut hs = vec![preset("W").unwrap(), preset("V").unwrap()];
    hs.extend((0..cfg.instances).map(|_| g.coercive_hamiltonian()));
    let mut worst: f64 = 0.0;
    for (k, h) in hs.iter().enumerate() {
        let env = h.decreasing_envelope().map_err(|e| format!("H #{k}: {e}"))?;
        let a0 = compute_a0(h).map_err(|e| format!("H #{k}: {e}"))?;
        let e = effective_flux(h, &env).map_err(|e| format!("H #{k}: {e}"))?;
        if !e.limiter.approx_eq(&a0, 1e-9) {
            return Err(format!("H #{k}: limiter of the envelope differs from A0"));
        }
        for p in sample_window(&[h], Some(&a0), 1000) {
            worst = worst.max((e.flux.eval(p) - env.eval(p)).abs());
        }
        if worst > 1e-12 {
            return Err(format!("H #{k}: effective flux deviates from the envelope by {}", sig15(worst)));
        }
    }
    Ok(format!("{} hamiltonians, max deviation {}", hs.len(), sig15(worst)))
}

fn worked_example() -> Result<String, String> {
    let a = compute_set_limiter(&preset("W").unwrap(), &preset("linear").unwrap()).map_err(|e| e.to_string())?;
    let got: Vec<(f64, f64, f64)> = a.points().iter().map(|p| (p.p_minus, p.p_plus, p.level)).collect();
    let want = [(-1.5, 0.5, 0.5), (1.0, f64::INFINITY, 0.0)];
    let near = |x: f64, y: f64| x == y || (x - y).abs() <= 1e-9;
    if got.len() == 2 && got.iter().zip(want).all(|(g, w)| near(g.0, w.0) && near(g.1, w.1) && near(g.2, w.2)) {
        Ok("plateaus [-1.5, 0.5] at 0.5 and [1, inf) at 0".into())
    } else {
        Err(format!("got {got:?}"))
    }
}

fn testfn_suite(cfg: &RunConfig) -> Vec<PropertyResult> {
    ADMISSIBLE_FLUXES
        .iter()
        .map(|name| {
            let outcome = build_test_function(&preset(name).unwrap(), &cfg.testfn)
                .map(|tf| {
                    format!(
                        "{} samples, max residual x>=0 {}, min phi {}",
                        tf.report.samples,
                        sig15(tf.report.max_residual_right),
                        sig15(tf.report.min_phi)
                    )
                })
                .map_err(|e| e.to_string());
            record(&format!("testfn.verify_phi.{name}"), outcome)
        })
        .collect()
}

fn solver_suite(cfg: &RunConfig) -> Vec<PropertyResult> {
    let h = preset("W").unwrap();
    let fa = effective_flux(&h, &preset("linear").unwrap()).expect("worked example").flux;

    let plane = (|| {
        let cfg = SchemeConfig { dx: 1.0 / 64.0, cfl: 0.25, t_final: 1000.0 / 256.0, snapshots: 100, ..SchemeConfig::default() };
        let sol = solve(&h, &fa, &PiecewiseLinear::affine(-2.0, 0.0), &cfg).map_err(|e| e.to_string())?;
        let worst = sol
            .times
            .iter()
            .zip(&sol.values)
            .flat_map(|(t, row)| row.iter().enumerate().map(move |(i, u)| (u + 2.0 * i as f64 * cfg.dx + t).abs()))
            .fold(0.0, f64::max);
        if worst <= 1e-12 {
            Ok(format!("{} steps, max error {}", sol.steps, sig15(worst)))
        } else {
            Err(format!("max error {}", sig15(worst)))
        }
    })();

    let convergence = (|| {
        let base = SchemeConfig { snapshots: 20, ..SchemeConfig::default() };
        let dxs = [1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0, 1.0 / 320.0];
        let rows = compare_runs(&h, &preset("linear").unwrap(), &PiecewiseLinear::affine(0.0, 0.0), &dxs, &base)
            .map_err(|e| e.to_string())?;
        let ds: Vec<String> = rows.iter().map(|r| sig15(r.difference)).collect();
        let order = hjhalf_core::solver::fitted_order(&rows);
        if rows.windows(2).all(|w| w[1].difference <= w[0].difference) && order >= 0.3 {
            Ok(format!("D = [{}], order {}", ds.join(", "), sig15(order)))
        } else {
            Err(format!("D = [{}], order {}", ds.join(", "), sig15(order)))
        }
    })();

    let grid = SchemeConfig { dx: 0.05, ..SchemeConfig::default() };
    let nodes = 200;
    let ordering = (|| {
        let mut g = InstanceGenerator::new(cfg.seed.wrapping_add(1));
        for k in 0..10 {
            let (h, f) = (g.coercive_hamiltonian(), g.boundary_flux());
            let low = g.samples(nodes, -1.0, 1.0);
            let high: Vec<f64> = low.iter().zip(g.samples(nodes, 0.0, 0.5)).map(|(a, b)| a + b).collect();
            check_ordering(&low, &high, &h, &f, &grid, 10_000).map_err(|e| format!("instance {k}: {e}"))?;
        }
        Ok("10 instances ordered over 10000 steps".to_string())
    })();

    let control = {
        let low: Vec<f64> = (0..nodes).map(|i| -(i as f64 * grid.dx).sin().abs()).collect();
        let unstable = SchemeConfig { cfl: 2.0, enforce_cfl: false, ..grid };
        match check_ordering(&low, &vec![0.1; nodes], &h, &fa, &unstable, 10_000) {
            Err(Error::OrderingViolated { step, node, .. }) => Ok(format!("cfl 2 violates at step {step}, node {node}")),
            Err(e) => Err(e.to_string()),
            Ok(_) => Err("cfl 2 run stayed ordered".into()),
        }
    };

    vec![
        record("solver.cfl_negative_control", control),
        record("solver.convergence", convergence),
        record("solver.ordering", ordering),
        record("solver.plane_wave", plane),
    ]
}

/// Runs every suite and sorts the results by property id.
pub fn run_verify(cfg: &RunConfig, sabotage: Option<Sabotage>) -> VerifyReport {
    let mut properties = limiter_suite(cfg, sabotage);
    properties.extend(testfn_suite(cfg));
    properties.extend(solver_suite(cfg));
    properties.sort_by(|a, b| a.id.cmp(&b.id));
    let failures = properties.iter().filter(|p| !p.passed).count();
    VerifyReport { seed: cfg.seed, instances: cfg.instances, passed: failures == 0, failures, properties }
}
