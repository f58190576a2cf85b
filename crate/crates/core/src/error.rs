use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability entry is negative, NaN or infinite.
    InvalidEntry {
        index: usize,
        value: f64,
    },
    /// Total mass deviates from one by more than the validation tolerance.
    MassMismatch {
        sum: f64,
    },
    /// Shape of the supplied data does not match the label lists.
    ShapeMismatch {
        expected: usize,
        found: usize,
    },
    EmptyAlphabet,
    DuplicateLabel(String),
    UnknownLabel(String),
    /// Two distributions that must share an alphabet do not.
    LabelMismatch(String),
    /// Conditioning on an event of probability zero.
    ZeroProbabilityEvent(String),
    /// Restriction leaves no mass.
    EmptySupport,
    EmptyAxisSet,
    /// α outside the domain of the requested operation.
    AlphaOutOfDomain {
        alpha: f64,
        expected: &'static str,
    },
    InvalidParameter(String),
    /// The iterative solver hit its iteration cap before certifying optimality.
    NonConvergence {
        iterations: usize,
        gap: f64,
        tol: f64,
    },
    /// Exhaustive search was requested on too large a support.
    SupportTooLarge {
        size: usize,
        max: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidEntry { index, value } => {
                write!(f, "invalid probability {value} at position {index}")
            }
            Error::MassMismatch { sum } => write!(f, "probabilities sum to {sum}, expected 1"),
            Error::ShapeMismatch { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            Error::EmptyAlphabet => f.write_str("alphabet must contain at least one symbol"),
            Error::DuplicateLabel(l) => write!(f, "duplicate label `{l}`"),
            Error::UnknownLabel(l) => write!(f, "unknown label `{l}`"),
            Error::LabelMismatch(msg) => write!(f, "label mismatch: {msg}"),
            Error::ZeroProbabilityEvent(z) => {
                write!(f, "cannot condition on zero-probability event `{z}`")
            }
            Error::EmptySupport => f.write_str("restriction leaves no probability mass"),
            Error::EmptyAxisSet => f.write_str("at least one axis must be kept"),
            Error::AlphaOutOfDomain { alpha, expected } => {
                write!(f, "alpha = {alpha} is outside {expected}")
            }
            Error::InvalidParameter(msg) => f.write_str(msg),
            Error::NonConvergence {
                iterations,
                gap,
                tol,
            } => write!(
                f,
                "solver did not converge after {iterations} iterations (gap {gap:e} > tol {tol:e})"
            ),
            Error::SupportTooLarge { size, max } => {
                write!(
                    f,
                    "support of size {size} exceeds exhaustive-search limit {max}"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
