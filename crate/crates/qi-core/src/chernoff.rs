//! Distinguishability functionals for binary state discrimination: the
//! s-overlap Q_s = Tr(rho^s rho'^(1-s)), its minimum over s (the Chernoff
//! quantity and exponent), a block-structured variant for control-system
//! outputs, the single-copy Helstrom error, and the deviation functional that
//! isolates how much interference terms reduce Q_s.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float; // resolves powf/ln/exp via libm in no_std builds

use crate::error::{CoreError, Result};
use crate::linalg::{
    clamp_spectrum, herm_eig, mat_pow_s, trace_norm_half, ComplexMatrix, EigDecomposition,
    DEFAULT_CLAMP,
};
use crate::protocols::ControlledState;

/// Largest tolerated imaginary residue in a trace that should be real.
const IMAG_TOL: f64 = 1e-9;
/// Slack allowed above unit trace before an operand is rejected.
const TRACE_SLACK: f64 = 1e-9;
/// Number of uniform seed points for the s-search bracket.
const GRID_POINTS: usize = 21;
/// Inverse golden ratio, the interval contraction factor per search step.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Outcome of minimizing s -> Q_s over [0, 1].
///
/// `epsilon` is exactly `-ln(q_min)`; `q_min` is the smallest value seen at
/// any probed s (clamped into [0, 1], with q_min = 0 mapping to infinite
/// exponent); `evaluations` counts objective evaluations spent.
#[derive(Clone, Debug)]
pub struct ChernoffResult {
    pub s_star: f64,
    pub q_min: f64,
    pub epsilon: f64,
    pub evaluations: usize,
}

/// Cached spectral data for repeated Q_s evaluations on one operand pair.
///
/// Both operands are diagonalized once; each evaluation then costs one pass
/// over the overlap table instead of a fresh pair of matrix powers. Spectra
/// are clamped on construction, so `eval` is infallible.
pub struct QsEvaluator {
    lambda: Vec<f64>,
    mu: Vec<f64>,
    /// overlap[i * dim + j] = |<u_i|v_j>|^2 for eigenvectors u of the first
    /// operand and v of the second.
    overlap: Vec<f64>,
    dim: usize,
}

impl QsEvaluator {
    /// Diagonalizes both operands and tabulates their eigenvector overlaps.
    pub fn new(rho: &ComplexMatrix, rho_prime: &ComplexMatrix) -> Result<Self> {
        check_operand_pair(rho, rho_prime)?;
        let eig_a = herm_eig(rho)?;
        let eig_b = herm_eig(rho_prime)?;
        Self::from_eigs(&eig_a, &eig_b)
    }

    /// Builds the evaluator from precomputed eigendecompositions.
    pub fn from_eigs(eig_a: &EigDecomposition, eig_b: &EigDecomposition) -> Result<Self> {
        let dim = eig_a.eigenvectors.dim;
        if eig_b.eigenvectors.dim != dim {
            return Err(CoreError::Dimension { expected: dim, got: eig_b.eigenvectors.dim });
        }
        let lambda = clamp_spectrum(&eig_a.eigenvalues, DEFAULT_CLAMP)?;
        let mu = clamp_spectrum(&eig_b.eigenvalues, DEFAULT_CLAMP)?;
        let cross = eig_a.eigenvectors.dagger().matmul(&eig_b.eigenvectors);
        let overlap = cross.entries.iter().map(|c| c.norm_sqr()).collect();
        Ok(Self { lambda, mu, overlap, dim })
    }

    /// Q_s for this pair. The support convention 0^s := 0 (including s = 0)
    /// restricts every power to the positive part of each spectrum.
    pub fn eval(&self, s: f64) -> f64 {
        let lam_pow: Vec<f64> =
            self.lambda.iter().map(|&l| if l > 0.0 { l.powf(s) } else { 0.0 }).collect();
        let mu_pow: Vec<f64> =
            self.mu.iter().map(|&m| if m > 0.0 { m.powf(1.0 - s) } else { 0.0 }).collect();
        let mut total = 0.0;
        for (i, &lp) in lam_pow.iter().enumerate() {
            if lp == 0.0 {
                continue;
            }
            let row = &self.overlap[i * self.dim..(i + 1) * self.dim];
            let mut acc = 0.0;
            for (g, mp) in row.iter().zip(&mu_pow) {
                acc += g * mp;
            }
            total += lp * acc;
        }
        total
    }
}

fn check_operand_pair(rho: &ComplexMatrix, rho_prime: &ComplexMatrix) -> Result<()> {
    if rho_prime.dim != rho.dim {
        return Err(CoreError::Dimension { expected: rho.dim, got: rho_prime.dim });
    }
    for (name, m) in [("first", rho), ("second", rho_prime)] {
        let tr = m.trace().re;
        if tr > 1.0 + TRACE_SLACK {
            return Err(CoreError::Parameter(format!(
                "{name} operand trace {tr} exceeds 1 beyond tolerance"
            )));
        }
    }
    Ok(())
}

fn check_tol_s(tol_s: f64) -> Result<()> {
    if !(tol_s > 0.0 && tol_s < 1.0) {
        return Err(CoreError::Parameter(format!("s tolerance {tol_s} outside (0, 1)")));
    }
    Ok(())
}

/// Tr(rho^s rho'^(1-s)) by direct matrix powers. Slower than going through a
/// `QsEvaluator` but independent of it, which makes it a useful cross-check.
pub fn q_s(rho: &ComplexMatrix, rho_prime: &ComplexMatrix, s: f64) -> Result<f64> {
    check_operand_pair(rho, rho_prime)?;
    let a = mat_pow_s(rho, s, DEFAULT_CLAMP)?;
    let b = mat_pow_s(rho_prime, 1.0 - s, DEFAULT_CLAMP)?;
    let tr = a.matmul(&b).trace();
    if tr.im.abs() > IMAG_TOL {
        return Err(CoreError::NumericalHealth(format!(
            "imaginary residue {} in Q_s trace",
            tr.im
        )));
    }
    Ok(tr.re)
}

/// Minimizes a unimodal objective over s in [0, 1]: a uniform grid brackets
/// the minimum, then golden-section contraction refines it to width `tol_s`.
/// The reported minimum is the smallest value seen at ANY probe, so it never
/// exceeds a grid sample.
fn minimize_over_s(mut objective: impl FnMut(f64) -> f64, tol_s: f64) -> ChernoffResult {
    let mut evaluations = 0;
    let mut best_q = f64::INFINITY;
    let mut best_s = 0.0;
    let mut grid = [0.0; GRID_POINTS];
    for (k, slot) in grid.iter_mut().enumerate() {
        let s = k as f64 / (GRID_POINTS - 1) as f64;
        let q = objective(s);
        evaluations += 1;
        *slot = q;
        if q < best_q {
            best_q = q;
            best_s = s;
        }
    }
    let best_k = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let mut lo = if best_k == 0 { 0.0 } else { (best_k - 1) as f64 * step };
    let mut hi = if best_k == GRID_POINTS - 1 { 1.0 } else { (best_k + 1) as f64 * step };

    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = objective(c);
    let mut fd = objective(d);
    evaluations += 2;
    if fc < best_q {
        best_q = fc;
        best_s = c;
    }
    if fd < best_q {
        best_q = fd;
        best_s = d;
    }
    let mut guard = 0;
    while hi - lo > tol_s && guard < 200 {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = objective(c);
            if fc < best_q {
                best_q = fc;
                best_s = c;
            }
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = objective(d);
            if fd < best_q {
                best_q = fd;
                best_s = d;
            }
        }
        evaluations += 1;
        guard += 1;
    }

    // Identical operands land within rounding noise of 1; snap so the
    // exponent of an indistinguishable pair is exactly zero.
    let q_min =
        if best_q > 1.0 - 1e-12 { 1.0 } else { best_q.clamp(0.0, 1.0) };
    let epsilon = if q_min > 0.0 { -q_min.ln() } else { f64::INFINITY };
    ChernoffResult { s_star: best_s, q_min, epsilon, evaluations }
}

/// Minimum of Q_s over s in [0, 1] and the resulting error exponent.
pub fn q_min(rho: &ComplexMatrix, rho_prime: &ComplexMatrix, tol_s: f64) -> Result<ChernoffResult> {
    check_tol_s(tol_s)?;
    let evaluator = QsEvaluator::new(rho, rho_prime)?;
    Ok(minimize_over_s(|s| evaluator.eval(s), tol_s))
}

/// Chernoff minimization for a pair of control-system outputs, exploiting
/// their shared block-diagonal structure: the objective splits into two
/// problems of half the dimension,
///   Q_s(full_eta, full_0) = Q_s(B+_eta, B+_0) + Q_s(B-_eta, B-_0),
/// where B+- = (rho +- gamma sigma)/2 are exactly the half-weight blocks the
/// `ControlledState` already stores together with their eigendecompositions.
pub fn epsilon_blocks(
    cs_eta: &ControlledState,
    cs_0: &ControlledState,
    tol_s: f64,
) -> Result<ChernoffResult> {
    check_tol_s(tol_s)?;
    if cs_0.dim() != cs_eta.dim() {
        return Err(CoreError::Dimension { expected: cs_eta.dim(), got: cs_0.dim() });
    }
    if (cs_eta.gamma - cs_0.gamma).abs() > 1e-12 {
        return Err(CoreError::Parameter(format!(
            "interference weights differ: {} vs {}",
            cs_eta.gamma, cs_0.gamma
        )));
    }
    let plus = QsEvaluator::from_eigs(&cs_eta.eig_plus, &cs_0.eig_plus)?;
    let minus = QsEvaluator::from_eigs(&cs_eta.eig_minus, &cs_0.eig_minus)?;
    Ok(minimize_over_s(|s| plus.eval(s) + minus.eval(s), tol_s))
}

/// Minimum achievable error probability when discriminating two equiprobable
/// states with one copy: (1 - half the trace norm of the difference) / 2.
pub fn helstrom_single_copy(rho: &ComplexMatrix, rho_prime: &ComplexMatrix) -> Result<f64> {
    if rho_prime.dim != rho.dim {
        return Err(CoreError::Dimension { expected: rho.dim, got: rho_prime.dim });
    }
    Ok(0.5 * (1.0 - trace_norm_half(&rho.sub(rho_prime))?))
}

/// How much the interference contribution `sigma` lowers Q_s:
///   Q_s(rho, rho') - (1/2) Q_s(rho + sigma, rho' + sigma')
///                  - (1/2) Q_s(rho - sigma, rho' - sigma').
/// The halves are folded into the operands (Q_s is 1-homogeneous under joint
/// scaling), which also keeps every operand's trace at most 1.
pub fn g_s_deviation(
    rho: &ComplexMatrix,
    rho_prime: &ComplexMatrix,
    sigma: &ComplexMatrix,
    sigma_prime: &ComplexMatrix,
    s: f64,
) -> Result<f64> {
    let half_plus = rho.add(sigma).scale(0.5);
    let half_plus_prime = rho_prime.add(sigma_prime).scale(0.5);
    let half_minus = rho.sub(sigma).scale(0.5);
    let half_minus_prime = rho_prime.sub(sigma_prime).scale(0.5);
    Ok(q_s(rho, rho_prime, s)?
        - q_s(&half_plus, &half_plus_prime, s)?
        - q_s(&half_minus, &half_minus_prime, s)?)
}

/// Error-probability bound exp(-M epsilon / 2) after M copies.
pub fn qcb_error_bound(epsilon: f64, copies: usize) -> Result<f64> {
    check_bound_inputs(epsilon, copies)?;
    Ok((-0.5 * copies as f64 * epsilon).exp())
}

/// The tighter textbook form (1/2) exp(-M epsilon) of the same bound.
pub fn qcb_error_bound_standard(epsilon: f64, copies: usize) -> Result<f64> {
    check_bound_inputs(epsilon, copies)?;
    Ok(0.5 * (-(copies as f64) * epsilon).exp())
}

fn check_bound_inputs(epsilon: f64, copies: usize) -> Result<()> {
    if copies == 0 {
        return Err(CoreError::Parameter("copy count must be at least 1".into()));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(CoreError::Parameter(format!("exponent {epsilon} must be nonnegative")));
    }
    Ok(())
}
