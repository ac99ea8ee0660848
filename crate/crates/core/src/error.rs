use thiserror::Error;

/// Errors produced anywhere in the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Closed forms that only hold in the topological phase.
    #[error("outside the topological phase: {0}")]
    PhaseDomain(String),

    #[error("schedule/config schema error: {0}")]
    Schema(String),

    #[error("numerical error: {0}")]
    Numeric(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("argument out of supported range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
