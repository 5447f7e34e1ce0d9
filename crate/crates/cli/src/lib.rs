//! IO, file formats, and the experiment harness around `sig-core`.

use std::fmt;

pub mod config;
pub mod csvout;
pub mod experiments;
pub mod parallel;
pub mod svg;
pub mod tablefile;

/// Harness-level error split by exit code: configuration problems exit 1,
/// numerical failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError::Numerical(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<sig_core::engine::EngineError> for CliError {
    fn from(e: sig_core::engine::EngineError) -> Self {
        match &e {
            sig_core::engine::EngineError::Quadrature { .. } => CliError::numerical(e.to_string()),
            _ => CliError::config(e.to_string()),
        }
    }
}

impl From<sig_core::curve::CurveError> for CliError {
    fn from(e: sig_core::curve::CurveError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<sig_core::invert::InvertError> for CliError {
    fn from(e: sig_core::invert::InvertError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<sig_core::norms::NormsError> for CliError {
    fn from(e: sig_core::norms::NormsError) -> Self {
        match &e {
            sig_core::norms::NormsError::Engine(inner) => {
                sig_core::engine::EngineError::clone(inner).into()
            }
            _ => CliError::config(e.to_string()),
        }
    }
}

impl From<sig_core::kernel::KernelError> for CliError {
    fn from(e: sig_core::kernel::KernelError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<sig_core::rational::SchemeError> for CliError {
    fn from(e: sig_core::rational::SchemeError) -> Self {
        CliError::config(e.to_string())
    }
}
