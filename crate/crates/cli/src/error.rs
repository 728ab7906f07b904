use qap_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Output(_) => 1,
            CliError::Core(e) => match e {
                Error::OverflowGuard { .. } => 3,
                Error::Divergence { .. } | Error::NotConverged(_) => 4,
                Error::Infeasible(_) => 5,
                _ => 2,
            },
        }
    }
}
