use thiserror::Error;

/// Errors raised by the series engines, the catalog and the harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by a series with no nonzero coefficient through order {trunc}")]
    DivisionByZeroSeries { trunc: i64 },

    #[error("coefficient of q^{n} requested but series is only valid through q^{trunc}")]
    OrderExceeded { n: i64, trunc: i64 },

    #[error("infinite product is identically zero: {0}")]
    PochInfiniteZero(String),

    #[error("series is not admissible in the {direction} direction")]
    InadmissibleSeries { direction: Direction },

    #[error("pole in term k = {k}: {detail}")]
    PoleInTerm { k: i64, detail: String },

    #[error("very-well-poised head {0} is not a perfect-square monomial")]
    NotAPerfectSquare(String),

    #[error("terminating representation needs one of c, -aq/d, -aq/e equal to q^-m")]
    TerminationRequired,

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("numeric sum did not converge after {terms} terms")]
    NoConvergence { terms: usize },

    #[error("non-finite value in numeric evaluation: {0}")]
    NonFinite(String),

    #[error("expression is not a monomial: {0}")]
    NotMonomial(String),

    #[error("unknown slot `{0}`")]
    UnknownSlot(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("backend {0} is not supported here")]
    UnsupportedBackend(String),

    #[error("no admissible sample for {0}")]
    NoAdmissibleSample(String),

    #[error("working order exhausted: needed q^{needed}, reached q^{reached}")]
    OrderBudget { needed: i64, reached: i64 },
}

impl Error {
    /// Short variant name, used for `skipped(<kind>)` verdicts.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZeroSeries { .. } => "DivisionByZeroSeries",
            Error::OrderExceeded { .. } => "OrderExceeded",
            Error::PochInfiniteZero(_) => "PochInfiniteZero",
            Error::InadmissibleSeries { .. } => "InadmissibleSeries",
            Error::PoleInTerm { .. } => "PoleInTerm",
            Error::NotAPerfectSquare(_) => "NotAPerfectSquare",
            Error::TerminationRequired => "TerminationRequired",
            Error::ConstraintViolation(_) => "ConstraintViolation",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NonFinite(_) => "NonFinite",
            Error::NotMonomial(_) => "NotMonomial",
            Error::UnknownSlot(_) => "UnknownSlot",
            Error::UnknownIdentity(_) => "UnknownIdentity",
            Error::Parse(_) => "Parse",
            Error::UnsupportedBackend(_) => "UnsupportedBackend",
            Error::NoAdmissibleSample(_) => "NoAdmissibleSample",
            Error::OrderBudget { .. } => "OrderBudget",
        }
    }
}

/// Summation direction of a (possibly bilateral) series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Forward => write!(f, "k -> +inf"),
            Direction::Backward => write!(f, "k -> -inf"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
