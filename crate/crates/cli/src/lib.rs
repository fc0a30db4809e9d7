//! Library side of the command-line driver: configuration handling, mode
//! execution, and artifact writing. The `twomode` binary is a thin
//! wrapper around [`config`] and [`run`].

pub mod config;
pub mod run;

#[derive(Debug)]
pub enum CliError {
    /// Invalid or inconsistent configuration (exit code 1).
    Config(String),
    /// Numerical failure during a run (exit code 2).
    Numerical(twomode::Error),
    Io(std::io::Error),
    VerificationFailed,
}

impl From<twomode::Error> for CliError {
    fn from(e: twomode::Error) -> Self {
        use twomode::Error::*;
        match e {
            InvalidParticleNumber(_)
            | InvalidSchedule(_)
            | InvalidPropagationConfig(_)
            | InvalidWellSpec(_)
            | DimensionMismatch { .. }
            | ScheduleDomain { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(e) => write!(f, "numerical abort: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::VerificationFailed => write!(f, "verification failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    /// Process exit code: 1 for configuration/input problems, 2 for
    /// numerical aborts and verification failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) | CliError::VerificationFailed => 2,
        }
    }
}
