use thiserror::Error;

use crate::rat::ExtRat;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: expected one of {expected:?}, found {found}")]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("negative exponent at byte {offset}")]
    NegativeExponent { offset: usize },
    #[error("fractional exponent in polynomial at byte {offset}")]
    FractionalExponentInPolynomial { offset: usize },
    #[error("term at byte {offset} is not below the truncation order")]
    TermBeyondTruncation { offset: usize },

    #[error("coefficients must be exact Gaussian rationals")]
    NonExactInput,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("arc is tangent to the x-axis (order below 1)")]
    TangentArc,

    #[error("series agree up to their common truncation {truncation}; expand further")]
    IndeterminateContact { truncation: ExtRat },
    #[error("truncation too shallow: {0}")]
    TruncationTooShallow(String),
    #[error("arc is a Newton-Puiseux root of f")]
    PhiIsRoot,
    #[error("value is not a root of the highest-edge polynomial")]
    NotARoot,
    #[error("no generic constant found for {purpose} after {attempts} samples")]
    GenericityFailed { purpose: String, attempts: usize },
    #[error("polar quotient routes disagree: polar branches give {polar:?}, approximations give {approximations:?}")]
    RouteMismatch {
        polar: Vec<String>,
        approximations: Vec<String>,
    },
    #[error("gradient exponent routes disagree: {0}")]
    ExponentMismatch(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("all samples degenerate (f vanishes or is not finite along the arc)")]
    DegenerateSamples,
}

impl Error {
    /// Failures of a certificate, as opposed to bad input or internal faults.
    pub fn is_certification_failure(&self) -> bool {
        matches!(
            self,
            Error::TruncationTooShallow(_)
                | Error::GenericityFailed { .. }
                | Error::RouteMismatch { .. }
                | Error::ExponentMismatch(_)
                | Error::IndeterminateContact { .. }
        )
    }

    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::NegativeExponent { .. }
                | Error::FractionalExponentInPolynomial { .. }
                | Error::TermBeyondTruncation { .. }
                | Error::NonExactInput
                | Error::InvalidInput(_)
                | Error::TangentArc
                | Error::PhiIsRoot
                | Error::NotARoot
                | Error::DegenerateSamples
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
