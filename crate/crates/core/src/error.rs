use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exact evaluation unavailable: {0}")]
    ExactnessUnavailable(String),

    #[error("basis is singular")]
    SingularBasis,

    #[error("vectors are linearly dependent")]
    DependentVectors,

    #[error("enumeration budget exceeded: predicted {predicted} points, cap {cap}")]
    EnumerationBudgetExceeded { predicted: u64, cap: u64 },

    #[error("time leaves the exact ln(lambda) grid: {0}")]
    GridViolation(String),

    #[error("lattice is not unimodular (covolume {0})")]
    NotUnimodular(String),

    #[error("comparison could not be decided at {bits} bits: {what}")]
    Undecided { what: String, bits: u32 },

    #[error("incompatible power bases {0} and {1}")]
    IncompatibleBases(u64, u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable tag used by the CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ExactnessUnavailable(_) => "ExactnessUnavailable",
            Error::SingularBasis => "SingularBasis",
            Error::DependentVectors => "DependentVectors",
            Error::EnumerationBudgetExceeded { .. } => "EnumerationBudgetExceeded",
            Error::GridViolation(_) => "GridViolation",
            Error::NotUnimodular(_) => "NotUnimodular",
            Error::Undecided { .. } => "Undecided",
            Error::IncompatibleBases(..) => "IncompatibleBases",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "Parse",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
