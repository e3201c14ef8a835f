use thiserror::Error;

use crate::config::Axis;

#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration violates an invariant; nothing was computed.
    #[error("invalid configuration: {0}")]
    Validation(String),

    /// A computation on a valid configuration failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A result file could not be read back.
    #[error("malformed result file {path}: {reason}")]
    Format { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Format { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Prefix the message with the sweep tuple it came from.
    pub fn in_tuple(self, tuple: &[(Axis, f64)]) -> Self {
        let label = tuple_label(tuple);
        match self {
            CliError::Validation(m) => CliError::Validation(format!("sweep tuple ({label}): {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("sweep tuple ({label}): {m}")),
            other => other,
        }
    }
}

pub fn tuple_label(tuple: &[(Axis, f64)]) -> String {
    tuple
        .iter()
        .map(|(ax, v)| format!("{}={v}", ax.name()))
        .collect::<Vec<_>>()
        .join(", ")
}

impl From<levy_escape::Error> for CliError {
    fn from(e: levy_escape::Error) -> Self {
        match e {
            levy_escape::Error::Numerical(m) => CliError::Numerical(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}
