//! Error type shared by every module of the kernel.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong inside the kernel.
///
/// Variants split into parameter/contract violations (caller bugs) and
/// numerical-health failures (violated invariants that signal an
/// implementation or model bug, not a caller bug).
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// A scalar argument is outside its documented range.
    Parameter(String),
    /// Operand dimensions are inconsistent.
    Dimension { expected: usize, got: usize },
    /// An operation requiring a Hermitian operand received one that is not.
    NotHermitian { deviation: f64 },
    /// A nominally positive semidefinite operand has an eigenvalue below the
    /// negativity tolerance.
    NegativeEigenvalue { value: f64, tolerance: f64 },
    /// A state block that must be positive semidefinite is not; signals a
    /// construction bug rather than bad input.
    PsdViolation { min_eigenvalue: f64, tolerance: f64 },
    /// The Jacobi eigensolver failed to reach its off-diagonal threshold.
    EigConvergence { off_norm: f64, sweeps: usize },
    /// A root/minimum bracket does not contain the target.
    SolverBracket(String),
    /// A channel construction is unavailable for the given parameters
    /// (e.g. the beam-splitter dilation at eta = 0).
    UnsupportedChannel(String),
    /// A computed quantity violates a numerical sanity bound
    /// (e.g. a trace with a large imaginary residue).
    NumericalHealth(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Parameter(msg) => write!(f, "parameter error: {msg}"),
            CoreError::Dimension { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            CoreError::NotHermitian { deviation } => {
                write!(f, "operand is not Hermitian (max |M - M^dagger| = {deviation:.3e})")
            }
            CoreError::NegativeEigenvalue { value, tolerance } => {
                write!(f, "negative eigenvalue {value:.3e} below tolerance -{tolerance:.3e}")
            }
            CoreError::PsdViolation { min_eigenvalue, tolerance } => {
                write!(
                    f,
                    "positive semidefiniteness violated: min eigenvalue {min_eigenvalue:.3e} \
                     (tolerance -{tolerance:.3e})"
                )
            }
            CoreError::EigConvergence { off_norm, sweeps } => {
                write!(
                    f,
                    "eigensolver did not converge: off-diagonal norm {off_norm:.3e} \
                     after {sweeps} sweeps"
                )
            }
            CoreError::SolverBracket(msg) => write!(f, "solver bracket error: {msg}"),
            CoreError::UnsupportedChannel(msg) => write!(f, "unsupported channel: {msg}"),
            CoreError::NumericalHealth(msg) => write!(f, "numerical health check failed: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CoreError {}

/// Kernel-wide result alias.
pub type Result<T> = core::result::Result<T, CoreError>;
