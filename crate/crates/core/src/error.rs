use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "variable count {k} exceeds the size cap {cap} (k=4 with 543 DAGs is the intended ceiling; set MINLAB_CAP to raise it)"
    )]
    CapExceeded { k: usize, cap: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid statement: {0}")]
    InvalidStatement(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("graph is not Markov to the distribution")]
    NotMarkov,

    #[error("sample is empty")]
    EmptySample,

    #[error("precondition: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
