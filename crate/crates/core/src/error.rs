use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("vertex budget exceeded: {needed} vertices > budget {budget}")]
    Budget { needed: u64, budget: u64 },
    #[error("digit out of range: {0}")]
    DigitRange(String),
    #[error("uid {uid} out of range for {count} vertices")]
    UidRange { uid: u64, count: u64 },
    #[error("invalid vertex set: {0}")]
    InvalidVertices(String),
    #[error("fan infeasible: {0}")]
    FanInfeasible(String),
    #[error("no path: {0}")]
    NoPath(String),
    #[error("outside construction range: {0}")]
    OutsideRange(String),
    #[error("construction failed in case {case}: {detail}")]
    Construction { case: String, detail: String },
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error("graph is not regular: {0}")]
    NotRegular(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
