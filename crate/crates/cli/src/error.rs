use mazer::MazerError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] MazerError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Config(_) | CliError::Model(MazerError::Domain(_) | MazerError::Configuration(_)) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}
