//! Error taxonomy shared by every module.
//!
//! Domain violations (a query outside the finiteness region of an oracle) are
//! deliberately distinct from numerical trouble: optimizers treat the former
//! as a hard barrier and the latter as a reason to fall back or report a
//! non-converged status.

use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    InvalidParameter(&'static str),
    /// A query point lies outside the domain where the requested quantity is
    /// finite, e.g. a second tilt argument at or beyond the threshold `T`.
    DomainViolation {
        what: &'static str,
        value: f64,
        bound: f64,
    },
    /// Vector or matrix dimensions do not line up.
    DimensionMismatch { expected: usize, got: usize },
    /// A combinatorial degree beyond the supported table range.
    UnsupportedDegree { degree: usize, max: usize },
    /// Importance sampling was asked to tilt toward an event whose rate is
    /// infinite; there is no admissible tilt.
    TiltRefused { r: f64 },
    /// An internal numerical routine failed to reach its tolerance.
    Numerical(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DomainViolation { what, value, bound } => {
                write!(f, "domain violation: {what} = {value} breaches bound {bound}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::UnsupportedDegree { degree, max } => {
                write!(f, "unsupported degree {degree}: tables stop at {max}")
            }
            Error::TiltRefused { r } => {
                write!(f, "tilt refused: rate at threshold {r} is infinite")
            }
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
