use std::process::ExitCode;

use torus_ns_core::Error as CoreError;

/// Exit statuses shared by every subcommand.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_BLOWUP: u8 = 3;
pub const EXIT_INVARIANT: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Core(CoreError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Core(e) => match e {
                CoreError::Config(_) | CoreError::Shape(_) | CoreError::InvalidArgument(_) => EXIT_CONFIG,
                CoreError::Format(_) => EXIT_CONFIG,
                CoreError::BlowUp { .. } => EXIT_BLOWUP,
                CoreError::Invariant(_) | CoreError::InconsistentInput(_) => EXIT_INVARIANT,
                _ => EXIT_FAILURE,
            },
            CliError::Io { .. } => EXIT_FAILURE,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

/// What a successful command reports back to `main`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Blow-up detected; artifacts up to the last finite state were written.
    BlowUp,
    /// A verification check failed.
    Failed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => EXIT_OK,
            Status::BlowUp => EXIT_BLOWUP,
            Status::Failed => EXIT_INVARIANT,
        }
    }
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s.code())
    }
}
