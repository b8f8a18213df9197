use std::fmt;

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Core(locspec::Error),
    /// A spectrum failed its own convergence test.
    Convergence(String),
    /// A certified bound exceeded the directly computed eigenvalue.
    Soundness(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(locspec::Error::Precondition { .. }) => 2,
            CliError::Core(locspec::Error::NoConvergence { .. } | locspec::Error::Bracket { .. }) => 3,
            CliError::Core(_) => 4,
            CliError::Convergence(_) => 3,
            CliError::Soundness(_) => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Convergence(m) => write!(f, "convergence failure: {m}"),
            CliError::Soundness(m) => write!(f, "soundness violation: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<locspec::Error> for CliError {
    fn from(e: locspec::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
