use thiserror::Error;

/// Named precondition failures. Each carries enough context to explain the refusal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Precondition {
    #[error("substitution `{0}` is not primitive")]
    NotPrimitive(String),
    #[error("substitution `{name}` is periodic (factor complexity p({witness}) <= {witness})")]
    Periodic { name: String, witness: usize },
    #[error("dilation of `{0}` is not a Pisot number")]
    NotPisot(String),
    #[error("algebraic number must exceed 1 for the Pisot test")]
    NotGreaterThanOne,
    #[error("`{0}` is pure discrete: its quotient is the maximal equicontinuous factor, not a substitution")]
    PureDiscrete(String),
    #[error("rpd construction requires coincidence rank 2, found {0}")]
    CoincidenceRankNotTwo(usize),
    #[error("the stack relation is not trivial on `{0}`")]
    StackRelationNotTrivial(String),
    #[error("substitution `{0}` is not proper")]
    NotProper(String),
    #[error("involution is invalid: {0}")]
    BadInvolution(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid substitution: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(#[from] Precondition),
    #[error("{stage}: cap exceeded ({what} > {limit}); result not certified")]
    CapExceeded {
        stage: String,
        what: String,
        limit: usize,
    },
    #[error("{stage}: {message}")]
    NotCertified { stage: String, message: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Invalid(_) => 2,
            Error::Precondition(_) => 3,
            Error::CapExceeded { .. } | Error::NotCertified { .. } => 4,
            Error::Internal(_) => 5,
        }
    }

    /// Prefix a stage label onto cap and certification errors.
    pub fn in_stage(self, stage: &str) -> Error {
        match self {
            Error::CapExceeded { stage: s, what, limit } => Error::CapExceeded {
                stage: format!("{stage}/{s}"),
                what,
                limit,
            },
            Error::NotCertified { stage: s, message } => Error::NotCertified {
                stage: format!("{stage}/{s}"),
                message,
            },
            other => other,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Invalid(_) => "invalid",
            Error::Precondition(_) => "precondition",
            Error::CapExceeded { .. } => "cap",
            Error::NotCertified { .. } => "not-certified",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
