use thiserror::Error;

/// Errors produced by the library.
///
/// Numerical non-events (an undefined branch, a pattern with no admissible
/// parameter, an empty list of Misiurewicz points) are ordinary values, not
/// errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter t = {0} is outside [0, 2]")]
    ParamOutOfRange(f64),

    #[error("invalid signature {0:?}: expected a non-empty string over '+' and '-'")]
    InvalidSignature(String),

    #[error("invalid cycle {0:?}: expected '+' followed by signs and a terminal 'C', or \"C\"")]
    InvalidCycle(String),

    #[error("{what} {requested} exceeds the configured maximum {max}")]
    TooLarge {
        what: &'static str,
        requested: usize,
        max: usize,
    },

    #[error("signatures are identical: {0}")]
    IdenticalSignatures(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("orbit of x = {x} hits the critical point {critical} at step {step}; the extremum type is ambiguous")]
    AmbiguousExtremum { x: f64, step: usize, critical: f64 },

    #[error("bisection did not converge on [{lo}, {hi}]; the piece is probably not monotone")]
    NonMonotonePiece { lo: f64, hi: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
