use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid action spec: {0}")]
    InvalidSpec(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(
        "group-theoretic dimension p = 0 (pure-torsion quotient); the growth theory assumes p >= 1"
    )]
    ZeroDimension,

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("free basis meets the kernel lattice nontrivially")]
    FreeBasisMeetsKernel,

    #[error("vectors are rationally dependent: {0}")]
    Dependent(String),

    #[error("resource budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("conservative action: K_X = 0, no Frechet scale exists")]
    Conservative,

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("model digest mismatch: dataset {dataset}, model {model}")]
    DigestMismatch { dataset: String, model: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
