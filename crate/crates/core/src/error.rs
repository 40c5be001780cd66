use thiserror::Error;

/// Errors raised by the model, dynamics and spectrum routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point lies outside the chart or operator domain.
    #[error("domain violation: {0}")]
    Domain(String),

    /// Parameters or constants of motion violate a bounded-regime inequality.
    /// The payload names the violated inequality.
    #[error("bounded regime violated: {0} does not hold")]
    Regime(String),

    /// `β/(2k√−α)` is too small for any level with `√−A_n > 0`.
    #[error("no bound state: β/(2k√−α) = {ratio} must exceed 1")]
    NoBoundState { ratio: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The integrator could not continue (step-size underflow or the state
    /// left the chart).
    #[error("trajectory escaped the chart domain at t = {time}")]
    DomainEscape { time: f64 },

    #[error("quadrature did not converge (error estimate {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
