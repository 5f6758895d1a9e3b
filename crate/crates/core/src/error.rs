use thiserror::Error;

/// Failures of the semi-infinite integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand returned a non-finite value at k = {k}")]
    NonFinite { k: f64 },

    #[error(
        "no convergence after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})"
    )]
    NoConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("invalid quadrature settings: {0}")]
    InvalidSpec(String),

    #[error("integrand does not decay: tau = {tau} must exceed max |rho| = {rho_max} by the light-cone window")]
    NonDecaying { tau: f64, rho_max: f64 },
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    #[error("observation point must lie above the wall (z = {z})")]
    BehindWall { z: f64 },

    #[error("observation point coincides with the atom (r0 = {r0:e})")]
    CoincidentPoint { r0: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("response tensor argument must be nonzero")]
    ZeroArgument,

    #[error("imaginary wavenumber must be non-negative (got {0})")]
    NegativeWavenumber(f64),

    #[error("time must be non-negative (got {0})")]
    NegativeTime(f64),

    #[error("evaluation on the light-cone wavefront: |ct - r| = {gap:e} for r = {r}")]
    Wavefront { r: f64, gap: f64 },

    #[error("invalid stencil: {0}")]
    InvalidStencil(String),

    #[error("stencil point too close to the origin (|r| = {r}, step = {step})")]
    OriginProximity { r: f64, step: f64 },

    #[error("angular quadrature did not stabilise (last change {change:e})")]
    AngularNonConvergence { change: f64 },

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

pub type Result<T> = std::result::Result<T, Error>;
