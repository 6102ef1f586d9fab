use std::fmt;

use serde::Serialize;

/// Why the shooting method found no cavitating solution for a given stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoSolutionReason {
    /// Every trajectory on the bracket turned sonic before `b` came down to the
    /// far-field stretch.
    SonicBeforeStretch,
    /// Trajectories reached the stretch but the Rankine-Hugoniot residual kept
    /// one sign over the whole bracket.
    NoSignChange,
}

impl fmt::Display for NoSolutionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoSolutionReason::SonicBeforeStretch => f.write_str("sonic before stretch"),
            NoSolutionReason::NoSignChange => f.write_str("no sign change"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {what} = {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("constitutive error: {0}")]
    Constitutive(String),

    #[error("sonic surface reached at s = {s}")]
    Sonic { s: f64 },

    #[error("integration failed at s = {s}: {msg}")]
    Integration { s: f64, msg: String },

    #[error("no cavitating solution for lambda = {lambda} ({reason}) on phi0 bracket [{phi_lo}, {phi_hi}]")]
    NoCavitatingSolution {
        lambda: f64,
        reason: NoSolutionReason,
        phi_lo: f64,
        phi_hi: f64,
    },

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {err:e} after {intervals} subintervals")]
    Quadrature {
        a: f64,
        b: f64,
        err: f64,
        intervals: usize,
    },

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("config error at `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn positive(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}
