//! Error type shared by all solver and certification modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `q_exp` argument at or below the domain floor `ℓ_q`.
    #[error("q-exponential argument {arg} is at or below the domain floor {floor}")]
    QExpFloor { arg: f64, floor: f64 },

    /// A shooting bracket could not be established.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// An iterative solver ran out of iterations or lost its bracket.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// A caller-supplied function violated its stated contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Time step rejected: the explicit reaction sub-step broke positivity.
    /// The caller should halve `dt` and retry.
    #[error("time step {dt} rejected: positivity violated by {violation:e}; halve dt and retry")]
    StepRejected { dt: f64, violation: f64 },

    /// Truncation radius too small for the requested quadrature tolerance.
    #[error("tail bound not satisfiable: {0}")]
    TailBound(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
