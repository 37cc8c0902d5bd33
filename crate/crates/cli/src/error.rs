use std::fmt::Display;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The config file could not be parsed.
    #[error("config: {0}")]
    Config(String),

    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error(transparent)]
    Model(#[from] qheat::Error),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn field(field: &str, message: impl Display) -> Self {
        CliError::Field {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    /// 2 for bad input, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Field { .. } => 2,
            CliError::Io(_) => 1,
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Model(qheat::Error::Io(_)) => 1,
            CliError::Model(qheat::Error::Csv(e)) if e.is_io_error() => 1,
            CliError::Model(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let numerical = CliError::Model(qheat::Error::Quadrature {
            estimate: 1.0,
            error: 1.0,
            tolerance: 1e-8,
        });
        assert_eq!(numerical.exit_code(), 3);
        assert_eq!(CliError::field("n", "bad").exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Io("x".into()).exit_code(), 1);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(CliError::Model(qheat::Error::Io(io)).exit_code(), 1);
    }
}
