//! Library side of the `xmpdm` command: configuration, table builders and
//! the verification report. `main.rs` only parses arguments and writes files.

pub mod commands;
pub mod config;
pub mod figures;
pub mod output;
pub mod verify;

use thiserror::Error;
use xmpdm::models::ModelError;
use xmpdm::orthopoly::OrthoError;
use xmpdm::quad::QuadError;
use xmpdm::solver::SolverError;
use xmpdm::susy::SusyError;

pub use config::{CaseTag, ConfigLayer, Format, RunConfig, VcChoice};
pub use output::{Cell, Document, Table};
pub use verify::{Check, Report, VerifyOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("numeric non-convergence: {0}")]
    NonConvergence(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Io { .. } => 1,
            Self::NonConvergence(_) => 3,
            Self::Numeric(_) => 3,
        }
    }
}

fn is_quad_nonconvergence(e: &QuadError) -> bool {
    matches!(e, QuadError::NoConvergence { .. })
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match &e {
            ModelError::InvalidParameter { .. } | ModelError::Domain { .. } | ModelError::RequiresM1(_) => {
                Self::Validation(e.to_string())
            }
            ModelError::Quadrature(q) | ModelError::Ortho(OrthoError::Quadrature(q)) if is_quad_nonconvergence(q) => {
                Self::NonConvergence(e.to_string())
            }
            ModelError::Ortho(OrthoError::InvalidAlpha(_) | OrthoError::ZeroCodimension) => {
                Self::Validation(e.to_string())
            }
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match &e {
            SolverError::InvalidGrid { .. } | SolverError::KOutOfRange { .. } => Self::Validation(e.to_string()),
            SolverError::NoConvergence { .. } | SolverError::NonMonotone(_) => Self::NonConvergence(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<SusyError> for CliError {
    fn from(e: SusyError) -> Self {
        match e {
            SusyError::Model(m) => m.into(),
            other => Self::Numeric(other.to_string()),
        }
    }
}
