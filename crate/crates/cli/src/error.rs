use std::path::Path;
use std::process::ExitCode;

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Usage(String),

    #[error(
        "eta = {0} is outside (0, 1/2): the limiting max-weight moments, D_p and entropy are defined only for 0 < η < 1/2"
    )]
    EtaRange(f64),

    #[error("{0}")]
    Model(#[from] rankdiff::Error),

    #[error(
        "verification failed: scenario `{scenario}`, verdict `{verdict}` (measured {measured}, threshold {threshold})"
    )]
    VerifyFailed {
        scenario: String,
        verdict: String,
        measured: f64,
        threshold: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn csv(path: &Path, e: csv::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// 2: configuration or usage; 3: no stationary law; 1: everything else,
    /// including a failed verification.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Config(_) | Self::Usage(_) | Self::EtaRange(_) => ExitCode::from(2),
            Self::Model(rankdiff::Error::ConditionViolated { .. }) => ExitCode::from(3),
            Self::Model(_) => ExitCode::from(2),
            Self::VerifyFailed { .. } | Self::Io { .. } => ExitCode::from(1),
        }
    }
}
