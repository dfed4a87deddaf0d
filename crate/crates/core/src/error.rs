use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("certification failed in {stage}: {reason}")]
    CertificationFailed { stage: &'static str, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate facet: {0}")]
    DegenerateFacet(String),

    #[error("no configuration realises the requested distances")]
    InfeasibleDistances,

    #[error("cap domain is empty")]
    EmptyDomain,

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(position: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: msg.into(),
        }
    }

    pub(crate) fn failed(stage: &'static str, reason: impl Into<String>) -> Self {
        Error::CertificationFailed {
            stage,
            reason: reason.into(),
        }
    }
}
