use std::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid piecewise-linear data: {0}")]
    InvalidBreakpoints(String),

    #[error("function is not strictly monotone")]
    NotMonotone,

    #[error("hamiltonian is not coercive (needs left tail slope < 0 < right tail slope)")]
    NotCoercive,

    #[error("boundary function is not admissible: {0}")]
    InadmissibleFlux(String),

    #[error("running infimum is unbounded below (left tail slope > 0)")]
    Unbounded,

    #[error("boundary function must be strictly decreasing on every segment")]
    NotStrictlyDecreasing,

    #[error("set limiter is not valid for this hamiltonian: {0}")]
    InvalidLimiter(String),

    #[error("integration step too large: E lost strict monotonicity near t = {t}")]
    StepTooLarge { t: f64 },

    #[error("tail bound not certified at T_max = {t_max} (R*E' = {lhs:.3e} exceeds |F(E)| = {rhs:.3e})")]
    TailBoundUnverified { t_max: f64, lhs: f64, rhs: f64 },

    #[error("test function verification failed: {0}")]
    VerificationFailed(FailureList),

    #[error("CFL condition violated: dt = {dt} exceeds {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("discrete ordering violated at step {step}, node {node} (difference {diff:.3e})")]
    OrderingViolated { step: usize, node: usize, diff: f64 },

    #[error("invalid scheme configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown preset `{name}` (available: {available})")]
    UnknownPreset { name: String, available: String },

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Offending samples collected by a verification pass.
#[derive(Debug, Clone, Default)]
pub struct FailureList(pub Vec<String>);

impl fmt::Display for FailureList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 5;
        for (i, item) in self.0.iter().take(SHOWN).enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            f.write_str(item)?;
        }
        if self.0.len() > SHOWN {
            write!(f, "; ... ({} more)", self.0.len() - SHOWN)?;
        }
        Ok(())
    }
}
