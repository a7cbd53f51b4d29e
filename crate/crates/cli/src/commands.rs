//! The `limiter`, `testfn`, `solve` and `converge` subcommands.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use hjhalf_core::limiter::{effective_flux, monotonicity_violation, sample_window, sandwich_violation, validate_set_limiter};
use hjhalf_core::solver::{compare_runs, fitted_order, solve};
use hjhalf_core::testfn::build_test_function;
use hjhalf_core::Error;

use crate::config::{BoundaryChoice, ConfigError, RunConfig};
use crate::output::{sig15, table, write};

/// Whether a command's own checks passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
}

pub const CHECK_SAMPLES: usize = 10_000;

pub fn limiter(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let (h, f) = (&cfg.hamiltonian, &cfg.flux);
    let e = effective_flux(h, f)?;
    let validation = validate_set_limiter(&e.limiter, h)?;
    let xs = sample_window(&[h, f], Some(&e.limiter), CHECK_SAMPLES);
    let sandwich = sandwich_violation(h, f, &e.flux, &xs);
    let monotone = monotonicity_violation(&e.flux, &xs);

    write(out, "limiter.csv", &e.limiter.to_csv())?;
    write(out, "effective_flux.csv", &e.flux.to_csv())?;
    let mut report = format!("hamiltonian: {}\nflux: {}\nplateaus: {}\n", cfg.hamiltonian_name, cfg.flux_name, e.limiter.len());
    for p in e.limiter.points() {
        let _ = writeln!(
            report,
            "  [{}, {}{} at level {} (p_alpha = {})",
            sig15(p.p_minus),
            sig15(p.p_plus),
            if p.p_plus.is_finite() { "]" } else { ")" },
            sig15(p.level),
            sig15(p.p_alpha)
        );
    }
    let _ = writeln!(report, "validation: {validation}");
    let verdict = |v: Option<f64>| v.map_or_else(|| "pass".to_string(), |p| format!("FAIL near p = {}", sig15(p)));
    let _ = writeln!(report, "sandwich ({CHECK_SAMPLES} samples): {}", verdict(sandwich));
    let _ = writeln!(report, "monotonicity ({CHECK_SAMPLES} samples): {}", verdict(monotone));
    write(out, "report.txt", &report)?;
    print!("{report}");
    Ok(if validation.is_valid() && sandwich.is_none() && monotone.is_none() { Status::Passed } else { Status::Failed })
}

pub fn testfn(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let tf = match build_test_function(&cfg.flux, &cfg.testfn) {
        Ok(tf) => tf,
        Err(Error::VerificationFailed(list)) => {
            let text = format!("flux: {}\nverification: FAIL\n{list}\n", cfg.flux_name);
            write(out, "phi_check.txt", &text)?;
            print!("{text}");
            return Ok(Status::Failed);
        }
        Err(e @ (Error::NotStrictlyDecreasing | Error::InadmissibleFlux(_))) => {
            return Err(ConfigError(vec![format!("flux `{}`: {e}", cfg.flux_name)]).into());
        }
        Err(e) => return Err(e.into()),
    };
    let t = &tf.tables;
    let time = &t.time;
    write(out, "E.csv", &table("t,E,E_prime", (0..time.len()).map(|i| [time.t(i), time.e[i], time.e_prime[i]])))?;
    write(out, "f.csv", &table("t,f", (0..time.len()).map(|i| [time.t(i), t.f[i]])))?;
    let grid = t.space.grid;
    write(out, "g.csv", &table("x,g,g_prime", (0..grid.nodes).map(|i| [grid.x(i), t.space.g[i], t.space.g_prime[i]])))?;
    let text = format!(
        "flux: {}\nT_max: {}\nmargin: {}\nrefined: {}\n{}\n",
        cfg.flux_name,
        sig15(tf.t_max),
        sig15(tf.margin),
        tf.refined,
        tf.report
    );
    write(out, "phi_check.txt", &text)?;
    print!("{text}");
    Ok(if tf.report.passed() { Status::Passed } else { Status::Failed })
}

fn boundary_flux(cfg: &RunConfig) -> Result<hjhalf_core::PiecewiseLinear> {
    Ok(match cfg.boundary {
        BoundaryChoice::Flux => cfg.flux.clone(),
        BoundaryChoice::Effective => effective_flux(&cfg.hamiltonian, &cfg.flux)?.flux,
    })
}

fn scheme_error(e: Error) -> anyhow::Error {
    match e {
        Error::InvalidConfig(msg) => ConfigError(vec![msg]).into(),
        e => e.into(),
    }
}

pub fn solve_cmd(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let f_bc = boundary_flux(cfg)?;
    let sol = solve(&cfg.hamiltonian, &f_bc, &cfg.initial, &cfg.scheme).map_err(scheme_error)?;
    let rows = sol
        .times
        .iter()
        .zip(&sol.values)
        .flat_map(|(&t, row)| row.iter().enumerate().map(move |(i, &u)| [t, i as f64 * sol.dx, u]));
    write(out, "solution.csv", &table("t,x,u", rows))?;
    let meta = format!(
        "hamiltonian = {}\nboundary_flux = {} ({})\ndx = {}\ndt = {}\nsigma = {}\ncfl = {}\nlength = {}\nnodes = {}\nsteps = {}\nt_final = {}\ngrowth_constant = {}\n",
        cfg.hamiltonian_name,
        cfg.flux_name,
        if cfg.boundary == BoundaryChoice::Effective { "effective" } else { "as given" },
        sig15(sol.dx),
        sig15(sol.dt),
        sig15(sol.sigma),
        sig15(sol.dt * sol.sigma / sol.dx),
        sig15(sol.length),
        sol.nodes(),
        sol.steps,
        sig15(sol.times.last().copied().unwrap_or(0.0)),
        sig15(sol.growth_constant())
    );
    write(out, "meta.txt", &meta)?;
    print!("{meta}");
    Ok(Status::Passed)
}

pub fn converge(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let rows = compare_runs(&cfg.hamiltonian, &cfg.flux, &cfg.initial, &cfg.ladder, &cfg.scheme).map_err(scheme_error)?;
    let mut text = String::from("dx,D,order\n");
    for r in &rows {
        let order = r.order.map(sig15).unwrap_or_default();
        let _ = writeln!(text, "{},{},{order}", sig15(r.dx), sig15(r.difference));
    }
    write(out, "rates.csv", &text)?;
    print!("{text}");
    let ds: Vec<f64> = rows.iter().map(|r| r.difference).collect();
    if ds.iter().all(|&d| d > 0.0) {
        println!("fitted order: {}", sig15(fitted_order(&rows)));
    }
    let monotone = ds.windows(2).all(|w| w[1] <= w[0]);
    if !monotone {
        println!("D is not monotone across the ladder");
    }
    Ok(if monotone { Status::Passed } else { Status::Failed })
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
