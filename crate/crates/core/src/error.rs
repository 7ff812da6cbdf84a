//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates an operation precondition.
    #[error("rejected input: {0}")]
    Rejected(String),

    /// A sampled value came out non-finite.
    #[error("non-finite sample at {location}")]
    NonFinite { location: String },

    /// The action is undefined where the wave function vanishes.
    #[error("singular point (psi = 0) at {location}")]
    Singular { location: String },

    /// Branch tracking cannot resolve the phase between neighboring samples.
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    /// Characteristics crossed; the transported correction is invalid there.
    #[error("caustic detected at t = {time}: characteristics cross")]
    Caustic { time: f64 },

    /// Time step too large for the explicit scheme.
    #[error("CFL violation: dt = {dt} exceeds stable limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    /// The evolved field became non-finite.
    #[error("divergence: non-finite field at step {step}")]
    Diverged { step: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed serialized data.
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn rejected(msg: impl Into<String>) -> Self {
        Error::Rejected(msg.into())
    }
}
