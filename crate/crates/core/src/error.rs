//! Error type shared by every module of the library.

use thiserror::Error;

/// Failures reported by the arithmetic, geometric and dynamical engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A decimal source ran out of trusted bits before the requested depth.
    #[error("precision exhausted: {certified} of {requested} levels certified")]
    PrecisionExhausted { requested: usize, certified: usize },
    /// Some level of the expansion is indistinguishable from zero.
    #[error("rational number detected at level {level}")]
    RationalDetected { level: usize },
    /// A level beyond the certified depth was requested.
    #[error("depth exceeded: level {requested} requested, {available} available")]
    DepthExceeded { requested: i64, available: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no preimage on the vertical line: {0}")]
    NoPreimage(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    /// The numeric representation cannot support the requested depth.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("point outside the domain: {0}")]
    OutsideDomain(String),
    #[error("point outside the attractor: {0}")]
    OutsideAttractor(String),
    #[error("point not in the sector: {0}")]
    NotInSector(String),
    #[error("resolution mismatch: {0} vs {1}")]
    ResolutionMismatch(usize, usize),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
