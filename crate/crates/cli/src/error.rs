use thiserror::Error;

/// Failure classes, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Guard(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// `error: code=<n> kind=<kind> message="<text>"` on one line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error: code={} kind={} message={:?}", self.code(), self.kind(), msg.trim())
    }
}

impl From<condeng::Error> for CliError {
    fn from(e: condeng::Error) -> Self {
        use condeng::Error as E;
        match e {
            E::Truncation { .. }
            | E::ZeroProbability { .. }
            | E::Overflow(_)
            | E::Numerical(_)
            | E::UndefinedForVacuum => CliError::Guard(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
