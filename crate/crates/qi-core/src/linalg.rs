//! Dense complex-matrix kernel: products, tensor products, partial trace,
//! Hermitian eigendecomposition, fractional matrix powers, and norms.
//!
//! All matrices are square, row-major, with composite indices ordered
//! leftmost-factor-slowest. One convention everywhere prevents silent
//! transposition bugs across modules.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};

// Float trait methods resolve the libm-backed math in no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

pub type Complex64 = num_complex::Complex<f64>;

/// Default eigenvalue clamp, relative to the spectral norm of the operand.
/// Numerically zero eigenvalues of rank-deficient blocks must not poison
/// fractional powers.
pub const DEFAULT_CLAMP: f64 = 1e-12;

/// Dense square complex matrix, the universal carrier for states and operators.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    pub dim: usize,
    /// Row-major entries; length is always `dim * dim`.
    pub entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix entrywise from `f(row, col)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = Complex64::new(*v, 0.0);
        }
        m
    }

    /// Rank-one projector |index><index| in a `dim`-dimensional space.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.entries[index * dim + index] = Complex64::new(1.0, 0.0);
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        ComplexMatrix { dim: self.dim, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        ComplexMatrix { dim: self.dim, entries }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        ComplexMatrix { dim: self.dim, entries }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        ComplexMatrix { dim: self.dim, entries }
    }

    /// Adds `factor * other` into `self` in place.
    pub fn add_scaled(&mut self, other: &Self, factor: f64) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * factor;
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    /// Plain matrix product.
    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row_out = &mut out.entries[i * n..(i + 1) * n];
                let row_b = &other.entries[k * n..(k + 1) * n];
                for (o, b) in row_out.iter_mut().zip(row_b) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max elementwise deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[i * n + j] - self.entries[j * n + i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }
}

/// Eigendecomposition of a Hermitian matrix: real ascending eigenvalues and
/// a unitary whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    /// Largest eigenvalue magnitude (the spectral norm of the operand).
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Rebuilds U diag(f(lambda)) U^dagger.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.reconstruct_from(&values)
    }

    /// Rebuilds U diag(values) U^dagger.
    pub fn reconstruct_from(&self, values: &[f64]) -> ComplexMatrix {
        let n = self.eigenvectors.dim;
        let u = &self.eigenvectors;
        // W = U scaled columnwise, result = W U^dagger.
        let mut w = ComplexMatrix::zeros(n);
        for (j, &d) in values.iter().enumerate() {
            for i in 0..n {
                w.entries[i * n + j] = u.entries[i * n + j] * d;
            }
        }
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += w.entries[i * n + k] * u.entries[j * n + k].conj();
                }
                out.entries[i * n + j] = acc;
            }
        }
        out
    }
}

/// Kronecker product; composite index (i_a * dim_b + i_b, j_a * dim_b + j_b).
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for ia in 0..na {
        for ja in 0..na {
            let va = a.entries[ia * na + ja];
            if va.re == 0.0 && va.im == 0.0 {
                continue;
            }
            for ib in 0..nb {
                for jb in 0..nb {
                    out.entries[(ia * nb + ib) * n + (ja * nb + jb)] =
                        va * b.entries[ib * nb + jb];
                }
            }
        }
    }
    out
}

/// Traces out the subsystems not listed in `keep` (ascending subsystem
/// indices into `dims`, leftmost factor slowest). Trace is preserved.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let full: usize = dims.iter().product();
    if full != m.dim {
        return Err(CoreError::Dimension { expected: full, got: m.dim });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(CoreError::Parameter(alloc::format!(
            "keep set must be strictly ascending subsystem indices below {}",
            dims.len()
        )));
    }

    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();

    // Flat offsets contributed by each kept / traced multi-index.
    let offsets = |subsys: &[usize]| -> Vec<usize> {
        let total: usize = subsys.iter().map(|&k| dims[k]).product();
        let mut offs = vec![0usize; total];
        for (flat, off) in offs.iter_mut().enumerate() {
            let mut rem = flat;
            for &k in subsys.iter().rev() {
                *off += (rem % dims[k]) * strides[k];
                rem /= dims[k];
            }
        }
        offs
    };
    let kept_offsets = offsets(keep);
    let traced_offsets = offsets(&traced);

    let out_dim = kept_offsets.len();
    let mut out = ComplexMatrix::zeros(out_dim);
    for (i, &oi) in kept_offsets.iter().enumerate() {
        for (j, &oj) in kept_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &ot in &traced_offsets {
                acc += m.entries[(oi + ot) * m.dim + (oj + ot)];
            }
            out.entries[i * out_dim + j] = acc;
        }
    }
    Ok(out)
}

/// Hermiticity tolerance for `herm_eig` operands.
const HERM_INPUT_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius threshold is `JACOBI_OFF_TOL * dim`.
const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues ascend; repeated calls on identical input are
/// bitwise deterministic.
pub fn herm_eig(m: &ComplexMatrix) -> Result<EigDecomposition> {
    let dev = m.hermiticity_deviation();
    if dev > HERM_INPUT_TOL {
        return Err(CoreError::NotHermitian { deviation: dev });
    }
    let n = m.dim;
    // Work on the exact Hermitian part so updates can assume symmetry.
    let mut a = ComplexMatrix::from_fn(n, |i, j| {
        (m.entries[i * n + j] + m.entries[j * n + i].conj()) * 0.5
    });
    let mut v = ComplexMatrix::identity(n);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.entries[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let threshold = JACOBI_OFF_TOL * n as f64;
    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(CoreError::EigConvergence { off_norm: off, sweeps });
        }
        sweeps += 1;

        for p in 0..n {
            for q in (p + 1)..n {
                let g = a.entries[p * n + q];
                let gabs = g.norm();
                if gabs == 0.0 {
                    continue;
                }
                let alpha = a.entries[p * n + p].re;
                let beta = a.entries[q * n + q].re;
                let phase = g / gabs;
                let tau = (alpha - beta) / (2.0 * gabs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary: U[p][p] = c, U[p][q] = -s phase, U[q][p] = s conj(phase),
                // U[q][q] = c; A <- U^dagger A U zeroes A[p][q].
                let sp = phase * s;

                // Row update (U^dagger A).
                for k in 0..n {
                    let apk = a.entries[p * n + k];
                    let aqk = a.entries[q * n + k];
                    a.entries[p * n + k] = apk * c + aqk * sp;
                    a.entries[q * n + k] = aqk * c - apk * sp.conj();
                }
                // Column update (A U), same transform on V.
                for k in 0..n {
                    let akp = a.entries[k * n + p];
                    let akq = a.entries[k * n + q];
                    a.entries[k * n + p] = akp * c + akq * sp.conj();
                    a.entries[k * n + q] = akq * c - akp * sp;

                    let vkp = v.entries[k * n + p];
                    let vkq = v.entries[k * n + q];
                    v.entries[k * n + p] = vkp * c + vkq * sp.conj();
                    v.entries[k * n + q] = vkq * c - vkp * sp;
                }
                // Enforce the exact zeros/realness the rotation achieves.
                a.entries[p * n + q] = Complex64::new(0.0, 0.0);
                a.entries[q * n + p] = Complex64::new(0.0, 0.0);
                a.entries[p * n + p] = Complex64::new(a.entries[p * n + p].re, 0.0);
                a.entries[q * n + q] = Complex64::new(a.entries[q * n + q].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.entries[i * n + i].re.total_cmp(&a.entries[j * n + j].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.entries[i * n + i].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors.entries[row * n + new_col] = v.entries[row * n + old_col];
        }
    }
    Ok(EigDecomposition { eigenvalues, eigenvectors })
}

/// Clamps an eigenvalue spectrum: values below `clamp * spectral_radius` are
/// zeroed (support convention), values below the negative tolerance error.
pub fn clamp_spectrum(eigenvalues: &[f64], clamp: f64) -> Result<Vec<f64>> {
    let radius = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let tol = clamp * radius;
    let mut out = Vec::with_capacity(eigenvalues.len());
    for &l in eigenvalues {
        if l < -tol {
            return Err(CoreError::NegativeEigenvalue { value: l, tolerance: tol });
        }
        out.push(if l <= tol { 0.0 } else { l });
    }
    Ok(out)
}

/// Fractional matrix power of a positive semidefinite Hermitian matrix, with
/// the support convention 0^s := 0 for all s in [0, 1].
pub fn mat_pow_s(m: &ComplexMatrix, s: f64, clamp: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&s) {
        return Err(CoreError::Parameter(alloc::format!("exponent s = {s} outside [0, 1]")));
    }
    let eig = herm_eig(m)?;
    let clamped = clamp_spectrum(&eig.eigenvalues, clamp)?;
    let powered: Vec<f64> =
        clamped.iter().map(|&l| if l == 0.0 { 0.0 } else { l.powf(s) }).collect();
    Ok(eig.reconstruct_from(&powered))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let eig = herm_eig(m)?;
    Ok(eig.eigenvalues.first().copied().unwrap_or(0.0))
}

/// Half the trace norm: (1/2) sum of singular values.
pub fn trace_norm_half(m: &ComplexMatrix) -> Result<f64> {
    Ok(0.5 * singular_values(m)?.iter().sum::<f64>())
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().fold(0.0, |acc: f64, &s| acc.max(s)))
}

/// Singular values, descending not guaranteed. Hermitian operands use their
/// eigenvalue magnitudes; general operands go through M^dagger M.
fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let scale = m.max_abs();
    if m.hermiticity_deviation() <= 1e-12 * (1.0 + scale) {
        let eig = herm_eig(m)?;
        return Ok(eig.eigenvalues.iter().map(|l| l.abs()).collect());
    }
    let h = m.dagger().matmul(m);
    let eig = herm_eig(&h)?;
    Ok(eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect())
}

/// Matrix exponential by scaling-and-squaring with a Taylor series; written
/// for the small anti-Hermitian beam-splitter generators, where the scaled
/// series is rapidly convergent.
pub fn expm(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let n = m.dim;
    let norm = m.frobenius_norm();
    let mut squarings = 0u32;
    let mut scale = 1.0f64;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = m.scale(scale);

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..200 {
        term = term.matmul(&scaled).scale(1.0 / k as f64);
        sum = sum.add(&term);
        if term.max_abs() <= tol * (1.0 + sum.max_abs()) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}
