use thiserror::Error;

/// Errors raised by the simulation routes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// One or more configuration invariants are violated. Every violation is listed.
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    /// An argument lies outside the domain of a function.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A log-scaled quantity cannot be represented as an `f64`.
    #[error("overflow in {op}: log-magnitude {log_magnitude}")]
    Overflow { op: &'static str, log_magnitude: f64 },

    /// The finite integration window truncates a non-negligible part of an integral.
    #[error("integration window too small: boundary contribution {ratio:e} of integral magnitude")]
    WindowTooSmall { ratio: f64 },

    /// Probability reached the edge strip of the propagation grid.
    #[error("wave packet touched the grid edge at t = {time}: edge probability {probability:e}")]
    EdgeContact { time: f64, probability: f64 },

    /// A quantum jump annihilated the wave function.
    #[error("degenerate norm {norm:e} after quantum jump")]
    DegenerateNorm { norm: f64 },

    /// The packet has not left the potential by the end of the evolution.
    #[error("stale spectrum at t_end: {detail}")]
    StaleSpectrum { detail: String },

    /// Two momentum grids do not overlap enough to be compared.
    #[error("momentum grids overlap on {overlap:.3} of the reference support (need 0.9)")]
    GridMismatch { overlap: f64 },

    /// Invalid momentum distribution data.
    #[error("invalid momentum distribution: {0}")]
    Distribution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}
