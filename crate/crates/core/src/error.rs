use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("inconsistent Cartan data: {0}")]
    InconsistentCartan(String),
    #[error("lattice is not between the coroot and coweight lattices: {0}")]
    LatticeNotBetweenQandP(String),
    #[error("Frobenius does not preserve the base: {0}")]
    FrobeniusNotBasePreserving(String),
    #[error("singular basis")]
    SingularBasis,
    #[error("malformed element text: {0}")]
    MalformedElement(String),
    #[error("search budget of {0} nodes exceeded")]
    SearchBudgetExceeded(usize),
    #[error("support {0} is not of finite type")]
    InfiniteSupport(String),
    #[error("subset {0} is not of finite type")]
    InfiniteType(String),
    #[error("dimension formula is not a nonnegative integer: {0}")]
    ParityViolation(String),
    #[error("cross-check mismatch: {0}")]
    CrossCheckMismatch(String),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("convention unverified: {0}")]
    ConventionUnverified(String),
    #[error("unsupported frame: {0}")]
    UnsupportedFrame(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable variant name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedDocument(_) => "MalformedDocument",
            Error::InconsistentCartan(_) => "InconsistentCartan",
            Error::LatticeNotBetweenQandP(_) => "LatticeNotBetweenQandP",
            Error::FrobeniusNotBasePreserving(_) => "FrobeniusNotBasePreserving",
            Error::SingularBasis => "SingularBasis",
            Error::MalformedElement(_) => "MalformedElement",
            Error::SearchBudgetExceeded(_) => "SearchBudgetExceeded",
            Error::InfiniteSupport(_) => "InfiniteSupport",
            Error::InfiniteType(_) => "InfiniteType",
            Error::ParityViolation(_) => "ParityViolation",
            Error::CrossCheckMismatch(_) => "CrossCheckMismatch",
            Error::IdentityViolation(_) => "IdentityViolation",
            Error::ConventionUnverified(_) => "ConventionUnverified",
            Error::UnsupportedFrame(_) => "UnsupportedFrame",
            Error::Io(_) => "Io",
        }
    }

    /// True when a computation ran but one of its internal checks failed,
    /// as opposed to bad input or an exhausted budget.
    pub fn is_check_failure(&self) -> bool {
        matches!(
            self,
            Error::ParityViolation(_)
                | Error::CrossCheckMismatch(_)
                | Error::IdentityViolation(_)
                | Error::ConventionUnverified(_)
        )
    }
}
