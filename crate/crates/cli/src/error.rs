use thiserror::Error;

/// Exit status for errors other than usage and promise violations.
pub const EXIT_FAILURE: u8 = 1;
/// Exit status for malformed invocations and configs.
pub const EXIT_USAGE: u8 = 2;
/// Exit status when amplification lands between the promise thresholds.
pub const EXIT_PROMISE_VIOLATED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] expgap_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Toml(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}
