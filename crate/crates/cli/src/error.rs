use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("unknown experiment {0:?}; run `probrep list`")]
    UnknownExperiment(String),
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    InvalidConfig(Vec<String>),
    #[error("cannot read config {path}: {reason}")]
    ConfigFile { path: String, reason: String },
    #[error("cannot write {path}: {reason}")]
    Unwritable { path: String, reason: String },
    #[error("experiment failed: {0}")]
    Compute(String),
}

impl CliError {
    /// Stable identifier printed with the message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::UnknownExperiment(_) => "unknown-experiment",
            CliError::InvalidConfig(_) => "invalid-parameters",
            CliError::ConfigFile { .. } => "bad-config-file",
            CliError::Unwritable { .. } => "unwritable-output",
            CliError::Compute(_) => "runtime-failure",
        }
    }

    /// 2 for configuration problems, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownExperiment(_)
            | CliError::InvalidConfig(_)
            | CliError::ConfigFile { .. } => 2,
            CliError::Unwritable { .. } | CliError::Compute(_) => 3,
        }
    }
}

impl From<probrep_core::Error> for CliError {
    fn from(e: probrep_core::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<probrep_gpt::GptError> for CliError {
    fn from(e: probrep_gpt::GptError) -> Self {
        CliError::Compute(e.to_string())
    }
}
