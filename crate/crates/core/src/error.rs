use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("root not bracketed on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("root solve did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("flux derivatives requested at U = {0}; they exist only for U > 1")]
    UnitU(f64),
    #[error("state out of range: {0}")]
    OutOfRange(String),
    #[error("inconsistent shock data: {0}")]
    InconsistentShock(String),
    #[error("model outside the supported regime: {0}")]
    Regime(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("infinite-sign-change regime unsupported ({0} sign changes found)")]
    TooManySignChanges(usize),
    #[error("family order violated at zeta = {zeta}: {detail}")]
    FamilyOrder { zeta: f64, detail: String },
    #[error("unsupported region at (phi, x) = ({phi}, {x}): below the characteristic-collision locus")]
    UnsupportedRegion { phi: f64, x: f64 },
    #[error("integrator step size underflow at {0}")]
    StepUnderflow(f64),
    #[error("quadrature did not converge on [{0}, {1}]")]
    Quadrature(f64, f64),
    #[error("CFL condition violated: {0}")]
    Cfl(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
