use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("star condition violated: {0}")]
    StarCondition(String),
    #[error("improper coloring: facets {0} and {1} are adjacent and share color {2}")]
    Coloring(String, String, usize),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("unknown catalog entry `{0}`")]
    Lookup(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
