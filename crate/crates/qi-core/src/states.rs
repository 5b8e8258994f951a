//! Truncated Fock-space state constructors: the photon-subtracted two-mode
//! squeezed signal/idler state, single-mode thermal states, and the control
//! qubit, plus the solver that recovers the squeezing parameter from a target
//! signal-mode photon number.

use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::linalg::{partial_trace, Complex64, ComplexMatrix};

#[allow(unused_imports)]
use num_traits::Float; // resolves powi/sqrt/abs via libm in no_std builds

/// Upper end of the bisection bracket for [`solve_lambda_for_nt`]; the mean
/// photon number diverges as λ → 1, so every practical target sits far below.
const LAMBDA_BRACKET_MAX: f64 = 0.999;
const SOLVER_TOL: f64 = 1e-10;
const SOLVER_MAX_ITERS: usize = 200;

const HERM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;

/// Two-mode density matrix on a `dim_a`·`dim_b` Fock space, with the A factor
/// indexed slowest. Construction enforces Hermiticity and unit trace;
/// positivity is checked on demand via [`BipartiteState::validate_psd`]
/// because it needs a full diagonalization.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: ComplexMatrix,
}

impl BipartiteState {
    pub fn new(dim_a: usize, dim_b: usize, matrix: ComplexMatrix) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(CoreError::Parameter("state dimensions must be positive".into()));
        }
        if matrix.dim != dim_a * dim_b {
            return Err(CoreError::Dimension { expected: dim_a * dim_b, got: matrix.dim });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERM_TOL {
            return Err(CoreError::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(CoreError::Parameter("state trace differs from 1".into()));
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    /// Reduced state of mode A (trace over B).
    pub fn reduced_a(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, &[self.dim_a, self.dim_b], &[0])
            .expect("dimensions validated at construction")
    }

    /// Reduced state of mode B (trace over A).
    pub fn reduced_b(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, &[self.dim_a, self.dim_b], &[1])
            .expect("dimensions validated at construction")
    }

    /// Full positivity check: fails with `PsdViolation` if any eigenvalue
    /// falls below the relative clamp threshold.
    pub fn validate_psd(&self, clamp: f64) -> Result<()> {
        let min = crate::linalg::min_eigenvalue(&self.matrix)?;
        let tolerance = clamp * self.matrix.max_abs().max(1.0);
        if min < -tolerance {
            return Err(CoreError::PsdViolation { min_eigenvalue: min, tolerance });
        }
        Ok(())
    }
}

/// Inputs for the squeezed-state constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePrepParams {
    /// Squeezing parameter, in [0, 1).
    pub lambda: f64,
    /// Fock-space truncation per mode.
    pub dim: usize,
    /// Rescale the truncated coefficient vector to unit norm (default on, so
    /// the truncated state is an exact density matrix).
    pub renormalize: bool,
}

impl StatePrepParams {
    pub fn new(lambda: f64, dim: usize) -> Result<Self> {
        let params = Self { lambda, dim, renormalize: true };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(CoreError::Parameter("squeezing parameter must lie in [0, 1)".into()));
        }
        if self.dim == 0 {
            return Err(CoreError::Parameter("truncation dimension must be positive".into()));
        }
        Ok(())
    }
}

/// Schmidt coefficients of the photon-subtracted two-mode squeezed state,
/// c_n = (1−λ²)^{3/2} (n+1) λⁿ / √(1+λ²), truncated to `dim` terms.
pub fn pstmss_coefficients(params: &StatePrepParams) -> Result<Vec<f64>> {
    params.validate()?;
    let lambda = params.lambda;
    let prefactor = (1.0 - lambda * lambda).powf(1.5) / (1.0 + lambda * lambda).sqrt();
    let mut coeffs = Vec::with_capacity(params.dim);
    let mut lambda_pow = 1.0;
    for n in 0..params.dim {
        coeffs.push(prefactor * (n as f64 + 1.0) * lambda_pow);
        lambda_pow *= lambda;
    }
    if params.renormalize {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(CoreError::Parameter("coefficient vector has zero norm".into()));
        }
        for c in &mut coeffs {
            *c /= norm;
        }
    }
    Ok(coeffs)
}

/// Pure-state projector of Σ c_n |n⟩_A |n⟩_B on the `dim`·`dim` space.
pub fn pstmss_state(params: &StatePrepParams) -> Result<BipartiteState> {
    let coeffs = pstmss_coefficients(params)?;
    let d = params.dim;
    let mut matrix = ComplexMatrix::zeros(d * d);
    for (m, &cm) in coeffs.iter().enumerate() {
        for (n, &cn) in coeffs.iter().enumerate() {
            matrix.set(m * d + m, n * d + n, Complex64::new(cm * cn, 0.0));
        }
    }
    BipartiteState::new(d, d, matrix)
}

/// Mean photon number of mode A: Σ_n n·⟨n|ρ_A|n⟩.
pub fn mean_photon_a(state: &BipartiteState) -> f64 {
    let reduced = state.reduced_a();
    (0..state.dim_a).map(|n| n as f64 * reduced.at(n, n).re).sum()
}

/// Solve for the squeezing parameter whose truncated, renormalized state has
/// signal mean photon number `nt_target`, by bisection on [0, 0.999].
pub fn solve_lambda_for_nt(nt_target: f64, dim: usize) -> Result<f64> {
    if nt_target < 0.0 {
        return Err(CoreError::Parameter("target photon number must be nonnegative".into()));
    }
    if nt_target == 0.0 {
        return Ok(0.0);
    }
    // Mean photon number from the coefficients directly; the parenthesization
    // matches the matrix path bitwise because the reduced state's diagonal
    // holds the products c_n·c_n.
    let photon_at = |lambda: f64| -> Result<f64> {
        let coeffs = pstmss_coefficients(&StatePrepParams { lambda, dim, renormalize: true })?;
        Ok(coeffs.iter().enumerate().map(|(n, c)| n as f64 * (c * c)).sum())
    };
    let mut lo = 0.0;
    let mut hi = LAMBDA_BRACKET_MAX;
    if photon_at(hi)? < nt_target {
        return Err(CoreError::SolverBracket(
            "target photon number exceeds the λ bracket".into(),
        ));
    }
    for _ in 0..SOLVER_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let value = photon_at(mid)?;
        if (value - nt_target).abs() <= SOLVER_TOL {
            return Ok(mid);
        }
        if value < nt_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(CoreError::SolverBracket("bisection failed to reach tolerance".into()))
}

/// Single-mode thermal state, diagonal entries Nʳ/(N+1)^{r+1} for r < dim;
/// renormalization rescales to unit trace.
pub fn thermal_state(n: f64, dim: usize, renormalize: bool) -> Result<ComplexMatrix> {
    if n < 0.0 {
        return Err(CoreError::Parameter("thermal photon number must be nonnegative".into()));
    }
    if dim == 0 {
        return Err(CoreError::Parameter("truncation dimension must be positive".into()));
    }
    let weights = thermal_weights(n, dim, renormalize);
    Ok(ComplexMatrix::diag(&weights))
}

/// Diagonal of [`thermal_state`] as a plain vector.
pub fn thermal_weights(n: f64, dim: usize, renormalize: bool) -> Vec<f64> {
    let ratio = n / (n + 1.0);
    let mut weights = Vec::with_capacity(dim);
    let mut w = 1.0 / (n + 1.0);
    for _ in 0..dim {
        weights.push(w);
        w *= ratio;
    }
    if renormalize {
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
    }
    weights
}

/// Control qubit |+⟩⟨+|: the 2×2 matrix with every entry ½.
pub fn control_plus() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |_, _| Complex64::new(0.5, 0.0))
}
