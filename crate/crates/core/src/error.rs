use thiserror::Error;

/// Errors raised by the symbolic and numeric engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(i64, i64),
    #[error("invalid truncation {value}: {reason}")]
    InvalidTruncation { value: i64, reason: &'static str },
    #[error("exp requires zero constant term, found {0}")]
    ExpConstantTerm(String),
    #[error("log requires constant term 1, found {0}")]
    LogConstantTerm(String),
    #[error("input is not a Lie element (weight {weight} fails the Dynkin criterion)")]
    NotLie { weight: usize },
    #[error("unbound Eichler symbol I[{n},{weight}]")]
    UnboundEichler { n: u32, weight: u32 },
    #[error("invalid weight {0}: {1}")]
    InvalidWeight(i64, &'static str),
    #[error("unsupported iterated Eisenstein index shape {0:?}")]
    UnsupportedIndexShape(Vec<u32>),
    #[error("tau must lie in the upper half-plane, got ({re}, {im})")]
    NotInUpperHalfPlane { re: f64, im: f64 },
    #[error("q-series cutoff M={cutoff} too small at Im(tau)={im_tau} for tolerance {tol:e}; increase M")]
    CutoffTooSmall { cutoff: usize, im_tau: f64, tol: f64 },
    #[error("shear operator undefined on negative powers of Ubar (exponent {0})")]
    NegativeShear(i32),
    #[error("negative exponent ({0},{1}) in a polynomial that is not Laurent-capable")]
    LaurentNotAllowed(i32, i32),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
