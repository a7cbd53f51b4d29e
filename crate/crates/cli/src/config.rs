//! Run configuration read from a TOML file and overridden by flags.

use std::fmt;
use std::path::{Path, PathBuf};

use hjhalf_core::presets::{preset, NAMES};
use hjhalf_core::solver::{RightBoundary, SchemeConfig};
use hjhalf_core::testfn::{SampleSpec, TestFunctionParams};
use hjhalf_core::PiecewiseLinear;
use serde::Deserialize;

/// Every problem found in a configuration, in the order found.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for e in &self.0 {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    hamiltonian: Option<String>,
    flux: Option<String>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    initial: RawInitial,
    #[serde(default)]
    solve: RawSolve,
    #[serde(default)]
    converge: RawConverge,
    #[serde(default)]
    testfn: RawTestfn,
    #[serde(default)]
    verify: RawVerify,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    dx: Option<f64>,
    length: Option<f64>,
    t_final: Option<f64>,
    cfl: Option<f64>,
    sigma: Option<f64>,
    snapshots: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    slope: Option<f64>,
    intercept: Option<f64>,
    file: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolve {
    boundary: Option<String>,
    right: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConverge {
    dx: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTestfn {
    dt: Option<f64>,
    t_max: Option<f64>,
    r: Option<f64>,
    x_nodes: Option<usize>,
    margin: Option<f64>,
    samples: Option<usize>,
    half_width: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    instances: Option<usize>,
}

/// Which boundary flux `solve` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryChoice {
    /// The configured flux as given.
    Flux,
    /// Its effective flux.
    Effective,
}

/// A validated configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub hamiltonian_name: String,
    pub hamiltonian: PiecewiseLinear,
    pub flux_name: String,
    pub flux: PiecewiseLinear,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub scheme: SchemeConfig,
    pub initial: PiecewiseLinear,
    pub boundary: BoundaryChoice,
    pub ladder: Vec<f64>,
    pub testfn: TestFunctionParams,
    pub instances: usize,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub hamiltonian: Option<String>,
    pub flux: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub const DEFAULT_LADDER: [f64; 4] = [1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0, 1.0 / 320.0];

/// A preset name, or a path to a function CSV relative to `base`.
pub fn resolve_function(name: &str, base: &Path) -> Result<PiecewiseLinear, String> {
    if NAMES.contains(&name) {
        return preset(name).map_err(|e| e.to_string());
    }
    let path = base.join(name);
    if path.is_file() {
        return PiecewiseLinear::read_csv(&path).map_err(|e| format!("{}: {e}", path.display()));
    }
    Err(format!("unknown preset or missing file `{name}` (available presets: {})", NAMES.join(", ")))
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(vec![format!("{}: {e}", path.display())]))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base, overrides)
}

/// Validates configuration text; relative file names resolve against `base`.
pub fn parse_config_str(text: &str, base: &Path, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(vec![e.to_string().trim_end().to_string()]))?;
    validate(raw, base, overrides)
}

/// Defaults plus overrides, for runs without a file.
pub fn default_config(overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    validate(RawConfig::default(), Path::new("."), overrides)
}

fn validate(raw: RawConfig, base: &Path, ov: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut errors = Vec::new();
    let mut positive = |name: &str, v: Option<f64>, default: f64| -> f64 {
        match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                errors.push(format!("{name} must be positive"));
                default
            }
            Some(x) => x,
            None => default,
        }
    };

    let scheme_default = SchemeConfig::default();
    let dx = positive("grid.dx", raw.grid.dx, scheme_default.dx);
    let t_final = positive("grid.t_final", raw.grid.t_final, scheme_default.t_final);
    let cfl = positive("grid.cfl", raw.grid.cfl, scheme_default.cfl);
    let length = raw.grid.length.map(|l| positive("grid.length", Some(l), 1.0));
    let sigma = raw.grid.sigma.map(|s| positive("grid.sigma", Some(s), 1.0));
    let tf_default = TestFunctionParams::default();
    let tf_dt = positive("testfn.dt", raw.testfn.dt, tf_default.dt);
    let tf_t_max = positive("testfn.t_max", raw.testfn.t_max, tf_default.t_max);
    let tf_r = positive("testfn.r", raw.testfn.r, tf_default.r);
    let tf_margin = positive("testfn.margin", raw.testfn.margin, tf_default.margin);
    let half_width = positive("testfn.half_width", raw.testfn.half_width, tf_default.samples.t_half);
    let ladder = match raw.converge.dx {
        Some(v) if v.len() < 2 => {
            errors.push("converge.dx needs at least two levels".into());
            DEFAULT_LADDER.to_vec()
        }
        Some(v) if v.iter().any(|&d| !(d > 0.0 && d.is_finite())) => {
            errors.push("converge.dx entries must be positive".into());
            DEFAULT_LADDER.to_vec()
        }
        Some(v) => v,
        None => DEFAULT_LADDER.to_vec(),
    };

    if cfl > 1.0 {
        errors.push("grid.cfl must not exceed 1".into());
    }
    if let Some(l) = length {
        if l < 3.0 * dx {
            errors.push("grid.length must span at least three cells".into());
        }
    }
    let snapshots = raw.grid.snapshots.unwrap_or(scheme_default.snapshots);
    if snapshots == 0 {
        errors.push("grid.snapshots must be at least 1".into());
    }
    let x_nodes = raw.testfn.x_nodes.unwrap_or(tf_default.x_nodes);
    if x_nodes < 3 {
        errors.push("testfn.x_nodes must be at least 3".into());
    }
    let samples = raw.testfn.samples.unwrap_or(tf_default.samples.nt);
    if samples < 2 {
        errors.push("testfn.samples must be at least 2".into());
    }
    let instances = raw.verify.instances.unwrap_or(50);
    if instances == 0 {
        errors.push("verify.instances must be at least 1".into());
    }

    let mut function = |key: &str, flag: &Option<String>, file: Option<String>, default: &str| {
        let name = flag.clone().or(file).unwrap_or_else(|| default.to_string());
        let f = resolve_function(&name, base).map_err(|e| errors.push(format!("{key}: {e}"))).ok();
        (name, f)
    };
    let (hamiltonian_name, hamiltonian) = function("hamiltonian", &ov.hamiltonian, raw.hamiltonian, "W");
    let (flux_name, flux) = function("flux", &ov.flux, raw.flux, "linear");
    if let Some(h) = &hamiltonian {
        if !h.is_coercive() {
            errors.push("hamiltonian must be coercive (left tail slope < 0 < right tail slope)".into());
        }
    }
    if let Some(f) = &flux {
        if !f.is_non_increasing() || !f.is_semicoercive() {
            errors.push("flux must be non-increasing with a decreasing left tail".into());
        }
    }

    let initial = match raw.initial.file {
        Some(file) => resolve_function(&file, base).map_err(|e| errors.push(format!("initial.file: {e}"))).ok(),
        None => Some(PiecewiseLinear::affine(raw.initial.slope.unwrap_or(0.0), raw.initial.intercept.unwrap_or(0.0))),
    };
    let boundary = match raw.solve.boundary.as_deref() {
        None | Some("flux") => BoundaryChoice::Flux,
        Some("effective") => BoundaryChoice::Effective,
        Some(other) => {
            errors.push(format!("solve.boundary must be `flux` or `effective`, not `{other}`"));
            BoundaryChoice::Flux
        }
    };
    let right = match raw.solve.right.as_deref() {
        None | Some("initial_slope") => RightBoundary::InitialSlope,
        Some("one_sided") => RightBoundary::OneSided,
        Some(other) => {
            errors.push(format!("solve.right must be `initial_slope` or `one_sided`, not `{other}`"));
            RightBoundary::InitialSlope
        }
    };

    if !errors.is_empty() {
        return Err(ConfigError(errors));
    }
    Ok(RunConfig {
        hamiltonian_name,
        hamiltonian: hamiltonian.expect("checked"),
        flux_name,
        flux: flux.expect("checked"),
        seed: ov.seed.or(raw.seed).unwrap_or(0),
        out_dir: ov.out_dir.clone().or(raw.out_dir).unwrap_or_else(|| PathBuf::from("out")),
        scheme: SchemeConfig { dx, t_final, cfl, sigma, length, right, snapshots, enforce_cfl: true },
        initial: initial.expect("checked"),
        boundary,
        ladder,
        testfn: TestFunctionParams {
            dt: tf_dt,
            t_max: tf_t_max,
            r: tf_r,
            x_nodes,
            margin: tf_margin,
            samples: SampleSpec { t_half: half_width, x_half: half_width, nt: samples, nx: samples },
            ..tf_default
        },
        instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        parse_config_str(text, Path::new("."), &Overrides::default())
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse("hamiltonian = \"W\"\nflux = \"linear\"\n").unwrap();
        assert_eq!(c.hamiltonian.eval(0.0), 1.0);
        assert_eq!(c.flux.eval(2.0), -2.0);
        assert_eq!(c.scheme, SchemeConfig::default());
        assert_eq!(c.ladder, DEFAULT_LADDER.to_vec());
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn negative_dx_is_reported() {
        let e = parse("[grid]\ndx = -1.0\n").unwrap_err();
        assert_eq!(e.0, vec!["grid.dx must be positive".to_string()]);
    }

    #[test]
    fn all_errors_are_collected() {
        let e = parse("hamiltonian = \"Q\"\n[grid]\ndx = -1.0\ncfl = 0.0\n[solve]\nboundary = \"x\"\n").unwrap_err();
        assert_eq!(e.0.len(), 4, "{e}");
        assert!(e.0.iter().any(|m| m.contains("available presets: W, V, linear")));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse("[grid]\ndx = = 1\n").unwrap_err();
        assert!(e.0[0].contains("line 2"), "{e}");
        assert!(parse("[grid]\nspeed = 1.0\n").unwrap_err().0[0].contains("speed"));
    }

    #[test]
    fn flags_override_file() {
        let ov = Overrides { hamiltonian: Some("V".into()), seed: Some(7), ..Overrides::default() };
        let c = parse_config_str("hamiltonian = \"W\"\nseed = 3\n", Path::new("."), &ov).unwrap();
        assert_eq!(c.hamiltonian_name, "V");
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn non_coercive_hamiltonian_is_rejected() {
        assert!(parse("hamiltonian = \"linear\"\n").unwrap_err().0[0].contains("coercive"));
    }
}
