use std::fmt;

use codim2::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config files, or parameters outside the model's domain.
    Config(String),
    Numerical(Error),
    /// The experiment ran but a criterion failed; the report has been written.
    Verification(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(e) if is_input_error(e) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

/// Errors that say the requested parameters are invalid rather than that a computation failed.
fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::Domain(_) | Error::Parity(_) | Error::NoResonance { .. } | Error::ResonanceViolation { .. })
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}
