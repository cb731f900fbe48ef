use thiserror::Error;

/// Errors raised by the geometry, model, transform, solver and experiment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance {distance} to the surface is not below its reach {reach}")]
    DistanceExceedsReach { distance: f64, reach: f64 },

    #[error("point coincides with the sphere center; projection is not unique")]
    CenterSingularity,

    #[error("point is {distance} away from the surface (tolerance {tolerance})")]
    NotOnSurface { distance: f64, tolerance: f64 },

    #[error("point lies on the surface (|offset| = {offset}); second derivatives are undefined there")]
    OnSurface { offset: f64 },

    #[error("transformed drift requested at a preimage on the surface (|offset| = {offset})")]
    OnSurfacePoint { offset: f64 },

    #[error("diffusion is degenerate in the normal direction: |sigma^T n| = {value}")]
    DegenerateNoise { value: f64 },

    #[error("Newton inversion did not converge after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("step count {n} does not divide the finest grid {fine}")]
    GridMismatch { n: usize, fine: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("transform certificate failed: {quantity} = {value} violates bound {bound}")]
    CertificateFailed {
        quantity: String,
        value: f64,
        bound: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
