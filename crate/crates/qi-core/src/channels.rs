//! The two noise processes acting on the signal mode: probabilistic photon
//! loss and thermal reflection off the target. Each exists in closed
//! superoperator form (canonical, exact under truncation) and in Kraus form
//! (used by the composite-operator construction and for cross-validation),
//! plus the beam-splitter dilation of the reflection channel.
//!
//! All operators here act on mode A; applied to a bipartite matrix they are
//! extended as K ⊗ I_B with A the slower tensor factor.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::linalg::{expm, kron, partial_trace, spectral_norm, Complex64, ComplexMatrix};
use crate::states::{thermal_state, thermal_weights};

#[allow(unused_imports)]
use num_traits::Float; // resolves sqrt/atan via libm in no_std builds

const EXPM_TOL: f64 = 1e-12;

/// Ordered Kraus-operator set; operators act on mode A (dim D) with an
/// implicit ⊗I_B extension, or on the full composite when dims match.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub operators: Vec<ComplexMatrix>,
    pub label: String,
}

/// Result of a completeness check: spectral deviation of Σ K†K from I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub deviation: f64,
    pub pass: bool,
}

/// Shared parameter bundle for the two channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Photon survival probability of each loss channel.
    pub p: f64,
    /// Target reflectivity.
    pub eta: f64,
    /// Thermal mean photon number of the environment.
    pub n: f64,
}

impl ChannelParams {
    pub fn new(p: f64, eta: f64, n: f64) -> Result<Self> {
        let params = Self { p, eta, n };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(CoreError::Parameter("survival probability must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(CoreError::Parameter("reflectivity must lie in [0, 1]".into()));
        }
        if self.n < 0.0 {
            return Err(CoreError::Parameter("thermal photon number must be nonnegative".into()));
        }
        Ok(())
    }
}

fn check_probability(value: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(CoreError::Parameter(alloc::format!("{name} must lie in [0, 1]")));
    }
    Ok(())
}

fn split_dims(x: &ComplexMatrix, dim_a: usize) -> Result<usize> {
    if dim_a == 0 || !x.dim.is_multiple_of(dim_a) {
        return Err(CoreError::Dimension { expected: dim_a, got: x.dim });
    }
    Ok(x.dim / dim_a)
}

/// Loss-channel Kraus set: K_0 = √p·I plus the D collapse operators
/// √(1−p)·|0⟩⟨n−1|. Completeness is exact at any truncation.
pub fn loss_kraus(p: f64, dim: usize) -> Result<KrausChannel> {
    check_probability(p, "survival probability")?;
    let mut operators = Vec::with_capacity(dim + 1);
    operators.push(ComplexMatrix::identity(dim).scale(p.sqrt()));
    let amp = (1.0 - p).sqrt();
    for n in 1..=dim {
        let mut k = ComplexMatrix::zeros(dim);
        k.set(0, n - 1, Complex64::new(amp, 0.0));
        operators.push(k);
    }
    Ok(KrausChannel { operators, label: "loss".into() })
}

/// Closed form of the loss channel on an A⊗B operand:
/// p·x + (1−p)·|0⟩_A⟨0| ⊗ Tr_A(x), extended to arbitrary x by linearity.
pub fn apply_loss_closed(p: f64, x: &ComplexMatrix, dim_a: usize) -> Result<ComplexMatrix> {
    check_probability(p, "survival probability")?;
    let dim_b = split_dims(x, dim_a)?;
    let reduced = partial_trace(x, &[dim_a, dim_b], &[1])?;
    let vacuum_part = kron(&ComplexMatrix::basis_projector(dim_a, 0), &reduced);
    let mut out = x.scale(p);
    out.add_scaled(&vacuum_part, 1.0 - p);
    Ok(out)
}

/// Closed form of the reflection channel on an A⊗B operand:
/// η·x + (1−η)·ρ_A^th ⊗ Tr_A(x), extended to arbitrary x by linearity.
pub fn thermal_reflect_closed(
    eta: f64,
    n: f64,
    x: &ComplexMatrix,
    dim_a: usize,
) -> Result<ComplexMatrix> {
    check_probability(eta, "reflectivity")?;
    let dim_b = split_dims(x, dim_a)?;
    let reduced = partial_trace(x, &[dim_a, dim_b], &[1])?;
    let replaced = kron(&thermal_state(n, dim_a, true)?, &reduced);
    let mut out = x.scale(eta);
    out.add_scaled(&replaced, 1.0 - eta);
    Ok(out)
}

/// Kraus set of the reflection channel: √η·I together with the replacement
/// family √((1−η)·w_r)·|r⟩⟨s| for r < r_max, s < D, with raw (unrenormalized)
/// thermal weights w_r. The completeness deficit is the weight the truncation
/// drops, (1−η)·(N/(N+1))^r_max.
pub fn thermal_kraus(eta: f64, n: f64, dim: usize, r_max: usize) -> Result<KrausChannel> {
    check_probability(eta, "reflectivity")?;
    if eta == 0.0 {
        return Err(CoreError::UnsupportedChannel(
            "reflectivity 0 has no Kraus truncation; use the closed form".into(),
        ));
    }
    if n < 0.0 {
        return Err(CoreError::Parameter("thermal photon number must be nonnegative".into()));
    }
    if r_max == 0 || r_max > dim {
        return Err(CoreError::Parameter("thermal index cutoff must lie in 1..=D".into()));
    }
    let weights = thermal_weights(n, r_max, false);
    let mut operators = Vec::with_capacity(1 + r_max * dim);
    operators.push(ComplexMatrix::identity(dim).scale(eta.sqrt()));
    for (r, &w) in weights.iter().enumerate() {
        let amp = ((1.0 - eta) * w).sqrt();
        for s in 0..dim {
            let mut k = ComplexMatrix::zeros(dim);
            k.set(r, s, Complex64::new(amp, 0.0));
            operators.push(k);
        }
    }
    Ok(KrausChannel { operators, label: "thermal-reflect".into() })
}

/// Beam-splitter unitary on A⊗E, exp{arctan[√((1−η)/η)]·(a_A a_E† − a_A† a_E)}
/// with truncated mode operators. Exact on total-photon sectors that fit the
/// truncation; requires η > 0.
pub fn beam_splitter_unitary(eta: f64, dim_a: usize, dim_e: usize) -> Result<ComplexMatrix> {
    check_probability(eta, "reflectivity")?;
    if eta == 0.0 {
        return Err(CoreError::UnsupportedChannel(
            "reflectivity 0 makes the beam-splitter angle singular".into(),
        ));
    }
    let theta = ((1.0 - eta) / eta).sqrt().atan();
    let lower = |d: usize| {
        ComplexMatrix::from_fn(d, |i, j| {
            if j == i + 1 {
                Complex64::new((j as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let a_a = lower(dim_a);
    let a_e = lower(dim_e);
    let generator = kron(&a_a, &a_e.dagger()).sub(&kron(&a_a.dagger(), &a_e)).scale(theta);
    Ok(expm(&generator, EXPM_TOL))
}

/// Dilation-derived Kraus family K_{jr} = √w_r·(I⊗⟨j|)·V_AE·(I⊗|r⟩) of the
/// beam-splitter attenuator with a thermal environment. This is a different
/// channel from [`thermal_reflect_closed`] away from η ∈ {0, 1}; it exists to
/// validate the dilation picture, not as an implementation path.
pub fn attenuator_kraus(eta: f64, n: f64, dim: usize, r_max: usize) -> Result<KrausChannel> {
    if r_max == 0 || r_max > dim {
        return Err(CoreError::Parameter("thermal index cutoff must lie in 1..=D".into()));
    }
    if n < 0.0 {
        return Err(CoreError::Parameter("thermal photon number must be nonnegative".into()));
    }
    let v = beam_splitter_unitary(eta, dim, dim)?;
    let weights = thermal_weights(n, r_max, false);
    let mut operators = Vec::with_capacity(r_max * dim);
    for (r, &w) in weights.iter().enumerate() {
        let amp = w.sqrt();
        for j in 0..dim {
            let k = ComplexMatrix::from_fn(dim, |a_out, a_in| {
                v.at(a_out * dim + j, a_in * dim + r).scale(amp)
            });
            operators.push(k);
        }
    }
    Ok(KrausChannel { operators, label: "attenuator".into() })
}

/// Spectral-norm completeness check of Σ K†K against the identity.
pub fn cptp_check(ch: &KrausChannel, tol: f64) -> Result<CptpReport> {
    let dim = match ch.operators.first() {
        Some(op) => op.dim,
        None => return Ok(CptpReport { deviation: 1.0, pass: false }),
    };
    let mut sum = ComplexMatrix::zeros(dim);
    for k in &ch.operators {
        if k.dim != dim {
            return Err(CoreError::Dimension { expected: dim, got: k.dim });
        }
        sum = sum.add(&k.dagger().matmul(k));
    }
    let deviation = spectral_norm(&sum.sub(&ComplexMatrix::identity(dim)))?;
    Ok(CptpReport { deviation, pass: deviation <= tol })
}

/// (K ⊗ I_B)·x for an A-side operator K, walking only K's nonzero entries.
pub fn apply_a_left(k: &ComplexMatrix, x: &ComplexMatrix, dim_a: usize) -> Result<ComplexMatrix> {
    if k.dim != dim_a {
        return Err(CoreError::Dimension { expected: dim_a, got: k.dim });
    }
    let dim_b = split_dims(x, dim_a)?;
    let n = x.dim;
    let mut out = ComplexMatrix::zeros(n);
    for a_out in 0..dim_a {
        for a_in in 0..dim_a {
            let v = k.at(a_out, a_in);
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            for b in 0..dim_b {
                let row_out = a_out * dim_b + b;
                let row_in = a_in * dim_b + b;
                for col in 0..n {
                    let add = v * x.at(row_in, col);
                    let cur = out.at(row_out, col);
                    out.set(row_out, col, cur + add);
                }
            }
        }
    }
    Ok(out)
}

/// x·(K† ⊗ I_B) for an A-side operator K, walking only K's nonzero entries.
pub fn apply_a_right_dag(
    k: &ComplexMatrix,
    x: &ComplexMatrix,
    dim_a: usize,
) -> Result<ComplexMatrix> {
    if k.dim != dim_a {
        return Err(CoreError::Dimension { expected: dim_a, got: k.dim });
    }
    let dim_b = split_dims(x, dim_a)?;
    let n = x.dim;
    let mut out = ComplexMatrix::zeros(n);
    for a_out in 0..dim_a {
        for a_in in 0..dim_a {
            // (K† ⊗ I) has entry conj(K[a_out, a_in]) at column block a_out.
            let v = k.at(a_out, a_in).conj();
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            for b in 0..dim_b {
                let col_out = a_out * dim_b + b;
                let col_in = a_in * dim_b + b;
                for row in 0..n {
                    let add = x.at(row, col_in) * v;
                    let cur = out.at(row, col_out);
                    out.set(row, col_out, cur + add);
                }
            }
        }
    }
    Ok(out)
}

/// (K ⊗ I_B)·x·(K† ⊗ I_B).
pub fn conjugate_a(k: &ComplexMatrix, x: &ComplexMatrix, dim_a: usize) -> Result<ComplexMatrix> {
    apply_a_right_dag(k, &apply_a_left(k, x, dim_a)?, dim_a)
}

/// Σ_K (K ⊗ I_B)·x·(K† ⊗ I_B) over the channel's operator set.
pub fn apply_kraus_sum(
    ch: &KrausChannel,
    x: &ComplexMatrix,
    dim_a: usize,
) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(x.dim);
    for k in &ch.operators {
        out = out.add(&conjugate_a(k, x, dim_a)?);
    }
    Ok(out)
}
