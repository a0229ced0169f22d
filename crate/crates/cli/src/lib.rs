//! System files, analyses and reports behind the `ddae` command.

pub mod analysis;
pub mod file;

use ddae_core::DdaeError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_IRREGULAR: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent input.
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Core(#[from] DdaeError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Core(DdaeError::Irregular(_)) => EXIT_IRREGULAR,
            CliError::Core(
                DdaeError::Parse(_) | DdaeError::Dimension(_) | DdaeError::NonPositiveDelay | DdaeError::Lookahead(_),
            ) => EXIT_INPUT,
            _ => EXIT_FAILURE,
        }
    }
}
