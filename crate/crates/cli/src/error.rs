use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes by failure class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const CFL: u8 = 3;
    pub const CHECK_FAILED: u8 = 4;
    pub const BLOW_UP: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Core(#[from] fhj_core::Error),

    #[error("checks failed: {0}")]
    CheckFailed(String),

    #[error("{0}")]
    Serialize(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use fhj_core::Error as E;
        match self {
            Self::Config(_) => exit::CONFIG,
            Self::CheckFailed(_) => exit::CHECK_FAILED,
            Self::Io { .. } | Self::Serialize(_) => exit::OTHER,
            Self::Core(e) => match e {
                E::CflViolation { .. } => exit::CFL,
                E::BlowUp { .. } | E::ImplicitSolve { .. } => exit::BLOW_UP,
                E::InvalidOrder(_)
                | E::InvalidInput(_)
                | E::GridMismatch(_)
                | E::OracleUnavailable(_)
                | E::InsufficientViscosity { .. }
                | E::Domain(_)
                | E::Pole(_)
                | E::ArgumentOutOfRange { .. } => exit::CONFIG,
                _ => exit::OTHER,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        let cfl = CliError::from(fhj_core::Error::CflViolation {
            number: 2.0,
            limit: 1.0,
        });
        assert_eq!(cfl.exit_code(), exit::CFL);
        assert_eq!(
            CliError::from(fhj_core::Error::BlowUp { step: 3 }).exit_code(),
            exit::BLOW_UP
        );
        assert_eq!(
            CliError::from(fhj_core::Error::InvalidOrder(2.0)).exit_code(),
            exit::CONFIG
        );
        assert_eq!(CliError::CheckFailed("x".into()).exit_code(), exit::CHECK_FAILED);
        let io = CliError::io("/nope", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert!(io.to_string().starts_with("/nope"));
        assert_eq!(io.exit_code(), exit::OTHER);
    }
}
