//! Output-state assembly for the four detection protocols: the plain
//! illumination chain (loss → reflect → loss), and the three
//! superposed-channel variants whose outputs share one block form on
//! control ⊗ A ⊗ B — equal diagonal blocks ρ_qi/2 and off-diagonal
//! interference blocks σ/2 that differ per protocol. Includes the composite
//! Kraus (W-operator) construction used to cross-validate the closed-form
//! path, and the control-qubit noise models.

use alloc::vec::Vec;

use crate::channels::{
    apply_a_left, apply_a_right_dag, apply_loss_closed, loss_kraus, thermal_kraus,
    thermal_reflect_closed, KrausChannel,
};
use crate::error::{CoreError, Result};
use crate::linalg::{
    clamp_spectrum, herm_eig, partial_trace, ComplexMatrix, EigDecomposition, DEFAULT_CLAMP,
};
use crate::states::{pstmss_state, StatePrepParams};

const HERM_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

/// Full parameter set for one protocol evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Target reflectivity under the target-present hypothesis.
    pub eta: f64,
    /// Environment thermal mean photon number.
    pub n_thermal: f64,
    /// Photon survival probability of each loss channel.
    pub p: f64,
    /// Fock truncation per mode.
    pub dim: usize,
    /// Squeezing parameter of the probe state.
    pub lambda: f64,
    /// Residual-coherence coefficient of the control qubit (2β_phase − 1).
    pub gamma: f64,
    /// No-flip probability of the control-qubit bit-flip channel.
    pub beta_bitflip: f64,
}

impl ProtocolParams {
    pub fn new(eta: f64, n_thermal: f64, p: f64, dim: usize, lambda: f64) -> Result<Self> {
        let params =
            Self { eta, n_thermal, p, dim, lambda, gamma: 1.0, beta_bitflip: 1.0 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(CoreError::Parameter("reflectivity must lie in [0, 1]".into()));
        }
        if self.n_thermal < 0.0 {
            return Err(CoreError::Parameter("thermal photon number must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(CoreError::Parameter("survival probability must lie in [0, 1]".into()));
        }
        if self.dim < 2 {
            return Err(CoreError::Parameter("truncation dimension must be at least 2".into()));
        }
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(CoreError::Parameter("squeezing parameter must lie in [0, 1)".into()));
        }
        if !(-1.0..=1.0).contains(&self.gamma) {
            return Err(CoreError::Parameter("coherence coefficient must lie in [-1, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.beta_bitflip) {
            return Err(CoreError::Parameter("bit-flip probability must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Probe/ancilla input state ρ_AB for these parameters.
    pub fn input_state(&self) -> Result<ComplexMatrix> {
        let state = pstmss_state(&StatePrepParams::new(self.lambda, self.dim)?)?;
        Ok(state.matrix)
    }
}

/// Output of the plain protocol: loss, then reflection at `eta_actual`
/// (0 = target absent), then loss again.
pub fn qi_output(params: &ProtocolParams, eta_actual: f64) -> Result<ComplexMatrix> {
    params.validate()?;
    let d = params.dim;
    let rho = params.input_state()?;
    let after_first = apply_loss_closed(params.p, &rho, d)?;
    let reflected = thermal_reflect_closed(eta_actual, params.n_thermal, &after_first, d)?;
    apply_loss_closed(params.p, &reflected, d)
}

/// Interference block of the superposed-order protocol:
/// Σ_{i,j} K_i·E(K_j ρ K_i†)·K_j† over the loss Kraus set, with the
/// reflection superoperator E extended to non-Hermitian operands by linearity.
pub fn sigma_ico(params: &ProtocolParams, eta_actual: f64) -> Result<ComplexMatrix> {
    params.validate()?;
    let d = params.dim;
    let rho = params.input_state()?;
    let loss = loss_kraus(params.p, d)?;
    let mut acc = ComplexMatrix::zeros(d * d);
    for k_i in &loss.operators {
        let right = apply_a_right_dag(k_i, &rho, d)?;
        for k_j in &loss.operators {
            let inner = apply_a_left(k_j, &right, d)?;
            let reflected = thermal_reflect_closed(eta_actual, params.n_thermal, &inner, d)?;
            let outer = apply_a_right_dag(k_j, &apply_a_left(k_i, &reflected, d)?, d)?;
            acc = acc.add(&outer);
        }
    }
    Ok(acc)
}

/// Interference block of the disjoint-environment protocol: the asymmetric
/// six-index sum collapses onto its vacuum-preserving term, p²·E(ρ).
pub fn sigma_psde(params: &ProtocolParams, eta_actual: f64) -> Result<ComplexMatrix> {
    params.validate()?;
    let rho = params.input_state()?;
    let reflected = thermal_reflect_closed(eta_actual, params.n_thermal, &rho, params.dim)?;
    Ok(reflected.scale(params.p * params.p))
}

/// Interference block of the environment-swap variant,
/// Σ_{i,l} K_i·E(K_l ρ K_i†)·K_l†. Same superoperator structure as
/// [`sigma_ico`] with the free indices paired the other way; evaluated with
/// an independently ordered loop nest so agreement checks are meaningful.
pub fn sigma_dco(params: &ProtocolParams, eta_actual: f64) -> Result<ComplexMatrix> {
    params.validate()?;
    let d = params.dim;
    let rho = params.input_state()?;
    let loss = loss_kraus(params.p, d)?;
    let mut acc = ComplexMatrix::zeros(d * d);
    for k_l in &loss.operators {
        let left = apply_a_left(k_l, &rho, d)?;
        for k_i in &loss.operators {
            let inner = apply_a_right_dag(k_i, &left, d)?;
            let reflected = thermal_reflect_closed(eta_actual, params.n_thermal, &inner, d)?;
            let outer = apply_a_left(k_i, &apply_a_right_dag(k_l, &reflected, d)?, d)?;
            acc = acc.add(&outer);
        }
    }
    Ok(acc)
}

/// [`sigma_dco`] evaluated with an explicit Kraus set for the reflection
/// channel (whose reflectivity it bakes in) instead of the closed form;
/// inherits that set's truncation error.
pub fn sigma_dco_with_channel(
    params: &ProtocolParams,
    reflect: &KrausChannel,
) -> Result<ComplexMatrix> {
    params.validate()?;
    let d = params.dim;
    let rho = params.input_state()?;
    let loss = loss_kraus(params.p, d)?;
    let mut acc = ComplexMatrix::zeros(d * d);
    for k_l in &loss.operators {
        let left = apply_a_left(k_l, &rho, d)?;
        for k_i in &loss.operators {
            let inner = apply_a_right_dag(k_i, &left, d)?;
            let mut reflected = ComplexMatrix::zeros(d * d);
            for k_e in &reflect.operators {
                let term = apply_a_right_dag(k_e, &apply_a_left(k_e, &inner, d)?, d)?;
                reflected = reflected.add(&term);
            }
            let outer = apply_a_left(k_i, &apply_a_right_dag(k_l, &reflected, d)?, d)?;
            acc = acc.add(&outer);
        }
    }
    Ok(acc)
}

/// Block decomposition of a controlled output state: diagonal blocks ρ_qi/2
/// and off-diagonal blocks γσ/2, stored as the two ±-combination blocks
/// (ρ_qi ± γσ)/2 together with their eigendecompositions.
#[derive(Debug, Clone)]
pub struct ControlledState {
    pub rho_qi: ComplexMatrix,
    pub sigma: ComplexMatrix,
    pub gamma: f64,
    pub block_plus: ComplexMatrix,
    pub block_minus: ComplexMatrix,
    pub eig_plus: EigDecomposition,
    pub eig_minus: EigDecomposition,
}

impl ControlledState {
    pub fn dim(&self) -> usize {
        self.rho_qi.dim
    }

    /// Full matrix on control ⊗ (A⊗B), control slowest:
    /// ½·[[ρ_qi, γσ], [γσ, ρ_qi]].
    pub fn full_matrix(&self) -> ComplexMatrix {
        let n = self.rho_qi.dim;
        let mut out = ComplexMatrix::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                let diag = self.rho_qi.at(i, j).scale(0.5);
                let off = self.sigma.at(i, j).scale(0.5 * self.gamma);
                out.set(i, j, diag);
                out.set(n + i, n + j, diag);
                out.set(i, n + j, off);
                out.set(n + i, j, off);
            }
        }
        out
    }
}

fn check_block_psd(eig: &EigDecomposition) -> Result<()> {
    match clamp_spectrum(&eig.eigenvalues, DEFAULT_CLAMP) {
        Ok(_) => Ok(()),
        Err(CoreError::NegativeEigenvalue { value, tolerance }) => {
            Err(CoreError::PsdViolation { min_eigenvalue: value, tolerance })
        }
        Err(other) => Err(other),
    }
}

/// Validate the block structure and precompute the ± blocks and their
/// spectra. A block eigenvalue below the clamp is a structural error: the
/// physical construction guarantees positivity.
pub fn assemble_controlled(
    rho_qi: &ComplexMatrix,
    sigma: &ComplexMatrix,
    gamma: f64,
) -> Result<ControlledState> {
    if sigma.dim != rho_qi.dim {
        return Err(CoreError::Dimension { expected: rho_qi.dim, got: sigma.dim });
    }
    if !(-1.0..=1.0).contains(&gamma) {
        return Err(CoreError::Parameter("coherence coefficient must lie in [-1, 1]".into()));
    }
    let dev = rho_qi.hermiticity_deviation();
    if dev > HERM_TOL {
        return Err(CoreError::NotHermitian { deviation: dev });
    }
    let dev = sigma.hermiticity_deviation();
    if dev > HERM_TOL {
        return Err(CoreError::NotHermitian { deviation: dev });
    }
    let trace = rho_qi.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(CoreError::Parameter("diagonal block trace differs from 1".into()));
    }

    let mut block_plus = rho_qi.clone();
    block_plus.add_scaled(sigma, gamma);
    let block_plus = block_plus.scale(0.5);
    let mut block_minus = rho_qi.clone();
    block_minus.add_scaled(sigma, -gamma);
    let block_minus = block_minus.scale(0.5);

    let eig_plus = herm_eig(&block_plus)?;
    let eig_minus = herm_eig(&block_minus)?;
    check_block_psd(&eig_plus)?;
    check_block_psd(&eig_minus)?;

    Ok(ControlledState {
        rho_qi: rho_qi.clone(),
        sigma: sigma.clone(),
        gamma,
        block_plus,
        block_minus,
        eig_plus,
        eig_minus,
    })
}

/// One composite Kraus term of a controlled channel: the operator applied on
/// the A side in the |0⟩⟨0| control block and the one in the |1⟩⟨1| block.
pub type WPair = (ComplexMatrix, ComplexMatrix);

fn loss_and_reflect(params: &ProtocolParams) -> Result<(KrausChannel, KrausChannel)> {
    let loss = loss_kraus(params.p, params.dim)?;
    let reflect = thermal_kraus(params.eta, params.n_thermal, params.dim, params.dim)?;
    Ok((loss, reflect))
}

/// Composite operators of the superposed-order channel: forward product
/// K_i·K_e·K_l in one control block, the reversed product K_l·K_e·K_i in the
/// other, for every index combination.
pub fn build_w_ico(params: &ProtocolParams) -> Result<Vec<WPair>> {
    params.validate()?;
    let (loss, reflect) = loss_and_reflect(params)?;
    let mut pairs = Vec::with_capacity(loss.operators.len().pow(2) * reflect.operators.len());
    for k_i in &loss.operators {
        for k_e in &reflect.operators {
            let fwd_head = k_i.matmul(k_e);
            let rev_tail = k_e.matmul(k_i);
            for k_l in &loss.operators {
                pairs.push((fwd_head.matmul(k_l), k_l.matmul(&rev_tail)));
            }
        }
    }
    Ok(pairs)
}

/// Composite operators of the disjoint-environment channel. Each control
/// block carries its own loss environments, so a term acts in the |0⟩ block
/// only when the |1⟩-side environments stay in vacuum and vice versa; the
/// suppressed side is a zero operator.
pub fn build_w_psde(params: &ProtocolParams) -> Result<Vec<WPair>> {
    params.validate()?;
    let (loss, reflect) = loss_and_reflect(params)?;
    let d = params.dim;
    let zero = ComplexMatrix::zeros(d);
    let mut pairs = Vec::new();
    for (i, k_i) in loss.operators.iter().enumerate() {
        for k_e in &reflect.operators {
            let head = k_i.matmul(k_e);
            for (l, k_l) in loss.operators.iter().enumerate() {
                let fwd = head.matmul(k_l);
                // Vacuum-label (index 0) loss operators on the flipped path.
                let rev = if i == 0 && l == 0 {
                    loss.operators[0].matmul(&k_e.matmul(&loss.operators[0]))
                } else {
                    zero.clone()
                };
                pairs.push((fwd, rev));
            }
        }
    }
    for (i, k_i) in loss.operators.iter().enumerate() {
        for k_e in &reflect.operators {
            let head = k_i.matmul(k_e);
            for (l, k_l) in loss.operators.iter().enumerate() {
                if i == 0 && l == 0 {
                    continue; // already counted with its forward partner
                }
                pairs.push((zero.clone(), head.matmul(k_l)));
            }
        }
    }
    Ok(pairs)
}

/// Apply a composite controlled channel to ρ_c ⊗ ρ_AB and return the full
/// output on control ⊗ (A⊗B). Block (a,b) of the output accumulates
/// ρ_c[a,b] · A_a·ρ_AB·A_b†, with all four blocks built independently.
pub fn output_via_w(
    pairs: &[WPair],
    rho_c: &ComplexMatrix,
    rho_ab: &ComplexMatrix,
    dim_a: usize,
) -> Result<ComplexMatrix> {
    if rho_c.dim != 2 {
        return Err(CoreError::Dimension { expected: 2, got: rho_c.dim });
    }
    let n = rho_ab.dim;
    let mut blocks = [
        ComplexMatrix::zeros(n),
        ComplexMatrix::zeros(n),
        ComplexMatrix::zeros(n),
        ComplexMatrix::zeros(n),
    ];
    for (fwd, rev) in pairs {
        let left_f = apply_a_left(fwd, rho_ab, dim_a)?;
        let left_r = apply_a_left(rev, rho_ab, dim_a)?;
        for (slot, (left, right)) in
            [(&left_f, fwd), (&left_f, rev), (&left_r, fwd), (&left_r, rev)]
                .into_iter()
                .enumerate()
        {
            let weight = rho_c.at(slot / 2, slot % 2);
            if weight.re == 0.0 && weight.im == 0.0 {
                continue;
            }
            let term = apply_a_right_dag(right, left, dim_a)?;
            let target = &mut blocks[slot];
            for (dst, src) in target.entries.iter_mut().zip(term.entries.iter()) {
                *dst += weight * src;
            }
        }
    }
    let mut out = ComplexMatrix::zeros(2 * n);
    for (slot, block) in blocks.iter().enumerate() {
        let (row0, col0) = ((slot / 2) * n, (slot % 2) * n);
        for i in 0..n {
            for j in 0..n {
                out.set(row0 + i, col0 + j, block.at(i, j));
            }
        }
    }
    Ok(out)
}

/// The four control-basis blocks of a matrix on control ⊗ system,
/// ordered [(0,0), (0,1), (1,0), (1,1)].
pub fn split_control_blocks(m: &ComplexMatrix) -> Result<[ComplexMatrix; 4]> {
    if !m.dim.is_multiple_of(2) {
        return Err(CoreError::Dimension { expected: m.dim + 1, got: m.dim });
    }
    let n = m.dim / 2;
    let block = |row0: usize, col0: usize| {
        ComplexMatrix::from_fn(n, |i, j| m.at(row0 + i, col0 + j))
    };
    Ok([block(0, 0), block(0, n), block(n, 0), block(n, n)])
}

/// Block pair of the state reaching the detector when the control qubit has
/// flipped: the probe ends in the unmeasured port, so mode A reads vacuum
/// and only the ancilla marginals survive.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorState {
    pub rho_block: ComplexMatrix,
    pub sigma_block: ComplexMatrix,
}

pub fn bitflip_error_state(
    rho_qi: &ComplexMatrix,
    sigma: &ComplexMatrix,
    dim_a: usize,
) -> Result<ErrorState> {
    if sigma.dim != rho_qi.dim {
        return Err(CoreError::Dimension { expected: rho_qi.dim, got: sigma.dim });
    }
    if dim_a == 0 || !rho_qi.dim.is_multiple_of(dim_a) {
        return Err(CoreError::Dimension { expected: dim_a, got: rho_qi.dim });
    }
    let dim_b = rho_qi.dim / dim_a;
    let vacuum = ComplexMatrix::basis_projector(dim_a, 0);
    let rho_b = partial_trace(rho_qi, &[dim_a, dim_b], &[1])?;
    let sigma_b = partial_trace(sigma, &[dim_a, dim_b], &[1])?;
    Ok(ErrorState {
        rho_block: crate::linalg::kron(&vacuum, &rho_b),
        sigma_block: crate::linalg::kron(&vacuum, &sigma_b),
    })
}

/// Convex mixture of the clean output blocks with the flipped-path blocks:
/// β·(ρ, σ) + (1−β)·(ρ_err, σ_err).
pub fn mix_bitflip(
    rho_qi: &ComplexMatrix,
    sigma: &ComplexMatrix,
    err: &ErrorState,
    beta: f64,
) -> (ComplexMatrix, ComplexMatrix) {
    let mut rho = rho_qi.scale(beta);
    rho.add_scaled(&err.rho_block, 1.0 - beta);
    let mut sig = sigma.scale(beta);
    sig.add_scaled(&err.sigma_block, 1.0 - beta);
    (rho, sig)
}
