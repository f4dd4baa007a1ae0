use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed tree: {0}")]
    Structure(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("invalid level map: {0}")]
    Level(String),
    #[error("no positively weighted vertex")]
    NoPositiveWeight,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("`{0}` is undefined on the stratum")]
    IllDefined(String),
    #[error("coordinate mismatch: {0}")]
    Coordinates(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verification(String),
}
