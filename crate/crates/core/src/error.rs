use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A closed-form expression was requested outside the region where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input did not satisfy a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The generator has more than one stationary state.
    #[error(
        "degenerate steady state: two smallest singular values {smallest:.3e} and {second:.3e} \
         are both below {threshold:.1e}"
    )]
    DegenerateSteadyState {
        smallest: f64,
        second: f64,
        threshold: f64,
    },

    /// The steady-state solve left a residual above tolerance.
    #[error("steady-state residual {residual:.3e} exceeds {tolerance:.1e}")]
    SteadyStateResidual { residual: f64, tolerance: f64 },

    /// An eigenvalue spectrum that should be real and nonnegative was not.
    #[error("numeric degeneracy in spectrum {spectrum:?}")]
    NumericDegeneracy { spectrum: Vec<(f64, f64)> },

    /// The integrator lost trace beyond tolerance.
    #[error(
        "trace drift {drift:.3e} at t = {time} exceeds {tolerance:.1e}; reduce dt (currently {dt})"
    )]
    StepSize {
        drift: f64,
        time: f64,
        dt: f64,
        tolerance: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}
