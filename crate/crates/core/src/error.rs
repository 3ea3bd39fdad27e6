use core::fmt;

/// Failure of a numerical operation, tagged with the operation that raised it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    Domain { op: &'static str, reason: &'static str },
    /// The result is not representable as a finite `f64`; use the log-space variant.
    Overflow { op: &'static str },
    /// An iterative or adaptive scheme did not meet its tolerance within budget.
    NonConvergence { op: &'static str, reason: &'static str },
    /// Reciprocal or square root of a series whose constant term is zero.
    ZeroConstantTerm { op: &'static str },
    /// The even-gap closed form was requested for an odd gap `j + k - m`.
    Parity { op: &'static str },
    /// A denominator vanished (to within 1e-300).
    Singular { op: &'static str, reason: &'static str },
    /// Finite-difference step is not strictly positive.
    InvalidStep { op: &'static str },
}

impl Error {
    /// Name of the operation that failed, e.g. `special::gamma_upper`.
    pub fn op(&self) -> &'static str {
        match *self {
            Error::Domain { op, .. }
            | Error::Overflow { op }
            | Error::NonConvergence { op, .. }
            | Error::ZeroConstantTerm { op }
            | Error::Parity { op }
            | Error::Singular { op, .. }
            | Error::InvalidStep { op } => op,
        }
    }

    /// True for failures of a numerical scheme rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Singular { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { op, reason } => write!(f, "{op}: domain error: {reason}"),
            Error::Overflow { op } => {
                write!(f, "{op}: result overflows f64, use the log-space variant")
            }
            Error::NonConvergence { op, reason } => write!(f, "{op}: did not converge: {reason}"),
            Error::ZeroConstantTerm { op } => write!(f, "{op}: series has zero constant term"),
            Error::Parity { op } => write!(f, "{op}: j + k - m must be even"),
            Error::Singular { op, reason } => write!(f, "{op}: singular: {reason}"),
            Error::InvalidStep { op } => write!(f, "{op}: step size must be > 0"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
