use thiserror::Error;

/// Errors raised by the numerical routines, samplers and the verifier.
///
/// Every variant that can originate deep inside a series or quadrature names
/// the operation that raised it so the CLI can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: invalid parameter: {msg}")]
    InvalidParameter { op: &'static str, msg: String },

    #[error("{op}: series did not converge within {terms} terms")]
    NonConvergence { op: &'static str, terms: usize },

    #[error("{op}: series terms do not decay (divergent regime)")]
    DivergentSeries { op: &'static str },

    #[error("{op}: alternating sum lost precision (max term / result = {ratio:.3e})")]
    PrecisionLoss { op: &'static str, ratio: f64 },

    #[error("{op}: birth rates {a} and {b} coincide")]
    DegenerateRates { op: &'static str, a: f64, b: f64 },

    #[error("{op}: {n} exceeds the exact 64-bit range")]
    Overflow { op: &'static str, n: u64 },

    #[error("{op}: CDF table is not monotone at node {index}")]
    TabulationFailure { op: &'static str, index: usize },

    #[error("{op}: rate {rate} exceeds the declared bound {bound} at time {time}")]
    InvalidBound {
        op: &'static str,
        time: f64,
        rate: f64,
        bound: f64,
    },

    #[error("{op}: continued-fraction denominator vanished")]
    DivisionUnderflow { op: &'static str },

    #[error("{op}: bisection bracket could not be established")]
    NoConvergence { op: &'static str },

    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

impl Error {
    pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidParameter {
            op,
            msg: msg.into(),
        }
    }

    /// Name of the operation that raised the error, if any.
    pub fn operation(&self) -> Option<&'static str> {
        match self {
            Error::InvalidParameter { op, .. }
            | Error::NonConvergence { op, .. }
            | Error::DivergentSeries { op }
            | Error::PrecisionLoss { op, .. }
            | Error::DegenerateRates { op, .. }
            | Error::Overflow { op, .. }
            | Error::TabulationFailure { op, .. }
            | Error::InvalidBound { op, .. }
            | Error::DivisionUnderflow { op }
            | Error::NoConvergence { op } => Some(op),
            Error::UnknownCheck(_) => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
