//! Error type for the sweep runner, with the process exit-code mapping.

use qi_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("config: {0}")]
    Config(String),
    #[error("numerical: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Process exit code: 1 parameter/config, 2 numerical health, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 1,
            SimError::Core(core) => match core {
                CoreError::Parameter(_)
                | CoreError::Dimension { .. }
                | CoreError::SolverBracket(_)
                | CoreError::UnsupportedChannel(_) => 1,
                CoreError::NotHermitian { .. }
                | CoreError::NegativeEigenvalue { .. }
                | CoreError::PsdViolation { .. }
                | CoreError::EigConvergence { .. }
                | CoreError::NumericalHealth(_) => 2,
            },
            SimError::Numerical(_) => 2,
            SimError::Io(_) => 3,
        }
    }
}

pub type Result<T> = core::result::Result<T, SimError>;
