use thiserror::Error;

/// Everything that can stop a command. Each variant maps to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Not JSON at all.
    #[error("{source_name}: malformed JSON: {message}")]
    Malformed { source_name: String, message: String },

    /// JSON of the wrong shape: missing or unknown fields, wrong types.
    #[error("{source_name}: schema violation at {path}: {message}")]
    Schema {
        source_name: String,
        path: String,
        message: String,
    },

    /// Well-formed document whose contents do not fit together: unresolved
    /// labels, mismatched shapes, several payloads, inconsistent tables.
    #[error("{source_name}: invalid document at {path}: {message}")]
    Invariant {
        source_name: String,
        path: String,
        message: String,
    },

    /// A command argument that does not parse or resolve.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Core(#[from] coevent_core::Error),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    /// 2 for bad input, 3 for capacity, 4 for domain failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed { .. }
            | CliError::Schema { .. }
            | CliError::Invariant { .. }
            | CliError::Argument(_) => 2,
            CliError::Core(coevent_core::Error::Capacity { .. }) => 3,
            CliError::Core(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    /// Short class name used in diagnostics.
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Malformed { .. } => "malformed",
            CliError::Schema { .. } => "schema",
            CliError::Invariant { .. } => "invariant",
            CliError::Argument(_) => "argument",
            CliError::Core(coevent_core::Error::Capacity { .. }) => "capacity",
            CliError::Core(_) => "domain",
            CliError::Io { .. } => "io",
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
