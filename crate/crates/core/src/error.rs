use thiserror::Error;

/// Errors raised by the certification engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero distribution contains a point at the origin")]
    PoleAtOrigin,

    #[error("quadrature failed to reach tolerance (estimate {estimate:e}, residual {residual:e})")]
    Tolerance { estimate: f64, residual: f64 },

    #[error("point outside the domain: {0}")]
    OutOfDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("kernel mass {mass} differs from 1")]
    InvalidKernel { mass: f64 },

    #[error("invalid Jensen potential: {0}")]
    InvalidPotential(String),

    #[error("invalid setup: {0}")]
    InvalidSetup(String),

    #[error("no convergent genus p <= {max} detected; supply the genus explicitly")]
    GenusOverflow { max: u32 },

    #[error("region is unbounded")]
    UnboundedRegion,
}

pub type Result<T> = std::result::Result<T, Error>;
