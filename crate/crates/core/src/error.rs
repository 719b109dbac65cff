use thiserror::Error;

/// Errors raised across the shock-wave pipeline.
#[derive(Debug, Error)]
pub enum ShockError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inadmissible shock: {predicate} condition fails")]
    Inadmissible { predicate: &'static str },

    #[error("domain too short: end-state gap {gap:.3e} exceeds tolerance {tol:.1e}")]
    DomainTooShort { gap: f64, tol: f64 },

    #[error("unsupported flux: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("ode integration failed: {0}")]
    Integration(String),

    #[error("point {z} refused: {reason}")]
    Refused { z: String, reason: String },

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("positive eigenvalue {max_eigenvalue:.6e} in weighted operator ({diagnostic})")]
    PositiveEigenvalue { max_eigenvalue: f64, diagnostic: String },

    #[error("numerical blow-up at t = {t:.6}: {detail}")]
    BlowUp { t: f64, detail: String },

    #[error("too few resolved modes: {resolved} (need {required})")]
    Unresolved { resolved: usize, required: usize },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ShockError>;
