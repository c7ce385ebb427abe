use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid coupler parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("truncation: tail mass {tail:.3e} exceeds tolerance {tol:.1e} ({what})")]
    Truncation { what: &'static str, tail: f64, tol: f64 },

    #[error("conditioning outcome has probability {p:.3e}, below {threshold:.0e}")]
    ZeroProbability { p: f64, threshold: f64 },

    #[error("mandel Q is undefined for a state with zero mean photon number")]
    UndefinedForVacuum,

    #[error("leading amplitude {lead:.3e} is negligible relative to norm {norm:.3e}")]
    DegenerateLeadingCoefficient { lead: f64, norm: f64 },

    #[error("degenerate coupler: {0}")]
    DegenerateCoupler(&'static str),

    #[error("threshold {threshold} is never reached (steady-state mean {steady:.6})")]
    UnreachableThreshold { threshold: f64, steady: f64 },

    #[error("intermediate magnitude {0:.3e} exceeds overflow guard")]
    Overflow(f64),

    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
