use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The rejection-sampled informative set never met the eigenvalue
    /// threshold within the retry budget.
    #[error(
        "informative set construction failed after {retries} attempts; \
         best minimum eigenvalue seen was {best_eigenvalue}"
    )]
    InformativeSetConstruction { retries: usize, best_eigenvalue: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("sampler diverged at iteration {iteration}: theta norm {norm:.3e} exceeds 1e3")]
    Divergence { iteration: usize, norm: f64 },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("trial {trial_index} with policy {policy}: {source}")]
    Trial {
        trial_index: usize,
        policy: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for config validation problems,
    /// 3 for numeric divergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 2,
            Error::Divergence { .. } | Error::Numeric(_) => 3,
            Error::Trial { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
