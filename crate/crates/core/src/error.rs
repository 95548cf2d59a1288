use thiserror::Error;

/// Errors produced by mesh construction, space setup, assembly and solves.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    Geometry(String),

    #[error("problem setup: {0}")]
    ProblemSetup(String),

    #[error("singular system at pivot {index}: {detail}")]
    SingularSystem { index: usize, detail: String },

    #[error("solver failed to reach tolerance: relative residual {residual:.3e} > {tolerance:.3e}")]
    ConvergenceFailure { residual: f64, tolerance: f64 },

    #[error("solve failed at h = {h}: {source}")]
    StudyStep {
        h: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
