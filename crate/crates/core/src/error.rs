use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not reach tolerance {requested:e} (estimated error {achieved:e})")]
    Quadrature { requested: f64, achieved: f64 },

    #[error("point is within {margin:e} of a pulse discontinuity at phi = {edge}")]
    NearDiscontinuity { edge: f64, margin: f64 },

    #[error("momentum grid does not resolve the envelope: refinement changed the value by {change:e} (tolerance {tolerance:e})")]
    GridResolution { change: f64, tolerance: f64 },

    #[error("field on the quadrature box boundary is {ratio:e} of its peak (limit {limit:e})")]
    BoxTruncation { ratio: f64, limit: f64 },

    #[error("{stage}: extrapolation did not converge (estimated error {achieved:e}, requested {requested:e})")]
    Extrapolation {
        stage: &'static str,
        requested: f64,
        achieved: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
