use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("label depth b = {b} lies above the surface label b0 = {b0}")]
    LabelOutsideDomain { b: f64, b0: f64 },

    /// The label sits on b = 0, where the inverse Jacobian and the vorticity blow up.
    #[error("singular at b = {b}: 1 - e^(2kb) vanishes")]
    SurfaceSingularity { b: f64 },

    #[error("point (x = {x}, z = {z}) at t = {t} is not below the free surface (eta = {eta})")]
    NotInDomain { t: f64, x: f64, z: f64, eta: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error(
        "finite-difference stencil point (x = {x}, z = {z}) at t = {t} leaves the fluid domain"
    )]
    StencilOutsideDomain { t: f64, x: f64, z: f64 },

    #[error("surface label sits on a cycloid cusp (phase {phase}); the slope is undefined")]
    Cusp { phase: f64 },

    #[error("particle left the fluid domain at t = {t}")]
    ParticleLeftDomain { t: f64 },

    #[error("invalid sampling grid: {0}")]
    InvalidGrid(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),
}
