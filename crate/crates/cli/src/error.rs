use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qqa_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        use qqa_core::Error as E;
        match self {
            RunError::Config(_) | RunError::Json(_) => EXIT_CONFIG,
            RunError::Core(e) => match e {
                E::InvalidConfig(_)
                | E::DimensionMismatch { .. }
                | E::DimensionTooSmall(_)
                | E::NameNotApplicable { .. }
                | E::IndexOutOfRange { .. }
                | E::NoisyPureState => EXIT_CONFIG,
                _ => EXIT_NUMERICAL,
            },
            RunError::Io(_) | RunError::Csv(_) => 1,
        }
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;

pub(crate) fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}
