use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("equilibrium solve did not converge after {iterations} iterations (max force residual {residual:e})")]
    EquilibriumNotConverged { iterations: usize, residual: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("dispersion estimate undefined: 1 - (2/3) ln(pi n / N) = {value} < 0")]
    DispersionDomain { value: f64 },

    #[error("revival time undefined for a single ion")]
    SingleIon,

    #[error(
        "no intervals: the smoothed spectral density needs at least two distinct mode frequencies"
    )]
    NoIntervals,

    #[error("fit window ({lo}, {hi}) holds {found} bins, need at least {needed}")]
    FitWindow {
        lo: f64,
        hi: f64,
        found: usize,
        needed: usize,
    },

    #[error("spectral density undefined at omega = {0}")]
    SpectralDomain(f64),

    #[error("Volterra march became unstable at t = {time} (|P| = {value})")]
    Unstable { time: f64, value: f64 },

    #[error("trace too short: {0}")]
    TraceTooShort(String),

    #[error("{0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
