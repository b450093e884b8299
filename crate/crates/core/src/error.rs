use thiserror::Error;

/// Errors raised by the transmission, photon-statistics and selection routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MazerError {
    #[error("domain error: {0}")]
    Domain(String),

    /// A wavenumber sits exactly on a threshold where the plane-wave basis collapses.
    #[error("numerical degeneracy at k/kappa = {k}: {reason}")]
    Degenerate { k: f64, reason: String },

    #[error("numerical failure at k/kappa = {k}, delta/g = {detuning}: {reason}")]
    NumericalFailure {
        k: f64,
        detuning: f64,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Configuration(String),
}

pub type Result<T> = std::result::Result<T, MazerError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(MazerError::Domain(msg.into()))
}
