use thiserror::Error;

/// Errors raised anywhere in the analytic pipeline or the numerical harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate normal form: {0}")]
    Degeneracy(String),

    #[error("no resonance: target period {target} outside attainable range [{lo}, {hi}]")]
    NoResonance { target: f64, lo: f64, hi: f64 },

    #[error("resonance violated: |n*T_k - m*T_hat| = {residual:e} exceeds {tol:e}")]
    ResonanceViolation { residual: f64, tol: f64 },

    #[error("parity error: {0}")]
    Parity(String),

    #[error("L is zero to within tolerance ({value:e}); orbit sits on the Hopf-candidate line")]
    DegenerateL { value: f64 },

    #[error("integration step failure at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("no fold found in parameter bracket [{lo}, {hi}]")]
    NoFoldInBracket { lo: f64, hi: f64 },

    #[error("periodic orbit is not a saddle: {0}")]
    NotASaddle(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
