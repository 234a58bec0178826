use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Verification(_) => 1,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<newton_solver::SolverError> for CliError {
    fn from(e: newton_solver::SolverError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<nose_stretch::NoseError> for CliError {
    fn from(e: nose_stretch::NoseError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
