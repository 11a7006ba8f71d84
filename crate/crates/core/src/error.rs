use thiserror::Error;

use crate::pdesim::Trajectory;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("invalid amplitude: {0}")]
    InvalidAmplitude(String),

    #[error("singular profile: {0}")]
    Singularity(String),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("no peakon: {0}")]
    NoPeakon(String),

    #[error("invalid simulation configuration: {0}")]
    Config(String),

    /// The simulation produced NaN/Inf. `partial` holds every snapshot recorded
    /// before the failure plus a final dump of the offending state.
    #[error("non-finite field at t = {t} (step {step})")]
    NonFinite {
        t: f64,
        step: usize,
        partial: Option<Box<Trajectory>>,
    },

    #[error("insufficient tail: {0}")]
    InsufficientTail(String),

    #[error("wave tracking lost: {0}")]
    TrackingLost(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
