use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("unknown preparation `{0}`")]
    UnknownPreparation(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("zero total probability for observed outcome `{0}`")]
    ZeroEvidence(String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
