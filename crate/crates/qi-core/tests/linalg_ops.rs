//! Operation-level checks for the dense complex kernel, each against an
//! independent oracle implemented in this file.

mod support;

use proptest::prelude::*;
use qi_core::linalg::{
    expm, herm_eig, kron, mat_pow_s, partial_trace, spectral_norm, trace_norm_half, Complex64,
    ComplexMatrix, DEFAULT_CLAMP,
};
use support::{random_density, random_hermitian, random_matrix, rng, unitarity_deviation};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Straight duplicate-free triple loop, accumulating per output entry.
fn mul_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim;
    ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| a.at(i, k) * b.at(k, j)).sum())
}

/// Explicit double-loop summation over the traced index, first factor kept.
fn partial_trace_first_oracle(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da, |i, j| {
        (0..db).map(|t| m.at(i * db + t, j * db + t)).sum()
    })
}

/// Determinant via LU with partial pivoting.
fn det_complex(m: &ComplexMatrix) -> Complex64 {
    let n = m.dim;
    let mut a = m.entries.clone();
    let mut det = ONE;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1 * n + col].norm().total_cmp(&a[r2 * n + col].norm()))
            .unwrap();
        if a[pivot_row * n + col].norm() == 0.0 {
            return ZERO;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            det = -det;
        }
        let pivot = a[col * n + col];
        det *= pivot;
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pivot;
            for k in col..n {
                let sub = factor * a[col * n + k];
                a[row * n + k] -= sub;
            }
        }
    }
    det
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
}

#[test]
fn kron_identity_case() {
    let i2 = ComplexMatrix::identity(2);
    assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
}

#[test]
fn kron_basis_projectors() {
    let a = ComplexMatrix::diag(&[1.0, 0.0]);
    let b = ComplexMatrix::diag(&[0.0, 1.0]);
    assert_eq!(kron(&a, &b), ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));
}

#[test]
fn kron_pauli_square_matches_mul_oracle() {
    let xx = kron(&pauli_x(), &pauli_x());
    let squared = mul_oracle(&xx, &xx);
    assert!(squared.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    assert!(xx.matmul(&xx).max_abs_diff(&squared) < 1e-15);
}

#[test]
fn partial_trace_product_state() {
    let mut r = rng(11);
    let rho = random_density(3, &mut r);
    let tau = random_density(2, &mut r);
    let joint = kron(&rho, &tau);
    let kept = partial_trace(&joint, &[3, 2], &[1]).unwrap();
    // Tr over the first factor of rho (x) tau leaves tau * Tr(rho) = tau.
    assert!(kept.max_abs_diff(&tau) < 1e-12);
}

#[test]
fn partial_trace_bell_state() {
    // (|00> + |11>)/sqrt(2) projector; either marginal is I/2.
    let mut bell = ComplexMatrix::zeros(4);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            bell.set(i, j, Complex64::new(0.5, 0.0));
        }
    }
    let marginal = partial_trace(&bell, &[2, 2], &[0]).unwrap();
    assert!(marginal.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
}

#[test]
fn partial_trace_matches_summation_oracle() {
    let mut r = rng(12);
    let m = random_matrix(6, &mut r);
    let kept = partial_trace(&m, &[3, 2], &[0]).unwrap();
    assert!(kept.max_abs_diff(&partial_trace_first_oracle(&m, 3, 2)) < 1e-13);
    // Trace preservation on the same input.
    assert!((kept.trace() - m.trace()).norm() < 1e-12);
}

#[test]
fn partial_trace_rejects_bad_dims() {
    let m = ComplexMatrix::identity(5);
    assert!(partial_trace(&m, &[3, 2], &[0]).is_err());
}

#[test]
fn herm_eig_diagonal_input() {
    let eig = herm_eig(&ComplexMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
    assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
}

#[test]
fn herm_eig_pauli_x_spectrum() {
    let eig = herm_eig(&pauli_x()).unwrap();
    assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
    assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
}

#[test]
fn herm_eig_char_polynomial_residual() {
    let mut r = rng(13);
    let m = random_hermitian(8, &mut r);
    let eig = herm_eig(&m).unwrap();
    for &lambda in &eig.eigenvalues {
        let shifted = m.sub(&ComplexMatrix::identity(8).scale(lambda));
        // det is a product of 8 entries of order 1; residual scale is loose.
        assert!(det_complex(&shifted).norm() < 1e-9);
    }
}

#[test]
fn herm_eig_rejects_non_hermitian() {
    let mut m = ComplexMatrix::zeros(2);
    m.set(0, 1, ONE);
    assert!(herm_eig(&m).is_err());
}

#[test]
fn herm_eig_decomposition_invariants() {
    let mut r = rng(14);
    for dim in [2usize, 5, 9] {
        let m = random_hermitian(dim, &mut r);
        let eig = herm_eig(&m).unwrap();
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert!(unitarity_deviation(&eig.eigenvectors) < 1e-10);
        let rebuilt = eig.reconstruct_with(|l| l);
        assert!(m.max_abs_diff(&rebuilt) < 1e-10 * (1.0 + eig.spectral_radius()));
    }
}

#[test]
fn herm_eig_repeated_calls_are_bitwise_identical() {
    let mut r = rng(15);
    let m = random_hermitian(6, &mut r);
    let a = herm_eig(&m).unwrap();
    let b = herm_eig(&m).unwrap();
    assert_eq!(a.eigenvalues, b.eigenvalues);
    assert_eq!(a.eigenvectors, b.eigenvectors);
}

#[test]
fn mat_pow_s_identity_exponent() {
    let mut r = rng(16);
    let rho = random_density(4, &mut r);
    let out = mat_pow_s(&rho, 1.0, DEFAULT_CLAMP).unwrap();
    assert!(out.max_abs_diff(&rho) < 1e-11);
}

#[test]
fn mat_pow_s_scalar_square_root() {
    let out = mat_pow_s(&ComplexMatrix::diag(&[4.0, 0.0]), 0.5, DEFAULT_CLAMP).unwrap();
    assert!(out.max_abs_diff(&ComplexMatrix::diag(&[2.0, 0.0])) < 1e-14);
}

#[test]
fn mat_pow_s_eigenbasis_multiplication_oracle() {
    let mut r = rng(17);
    let rho = random_density(5, &mut r);
    let product =
        mat_pow_s(&rho, 0.3, DEFAULT_CLAMP).unwrap().matmul(&mat_pow_s(&rho, 0.7, DEFAULT_CLAMP).unwrap());
    // Full-rank input: rho^0.3 rho^0.7 = rho on its whole space.
    assert!(product.max_abs_diff(&rho) < 1e-10);
}

#[test]
fn mat_pow_s_rejects_negative_spectrum() {
    let m = ComplexMatrix::diag(&[1.0, -0.2]);
    assert!(matches!(
        mat_pow_s(&m, 0.5, DEFAULT_CLAMP),
        Err(qi_core::CoreError::NegativeEigenvalue { .. })
    ));
}

#[test]
fn trace_norm_half_hermitian_example() {
    assert!((trace_norm_half(&ComplexMatrix::diag(&[1.0, -1.0])).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn trace_norm_half_zero_matrix() {
    assert_eq!(trace_norm_half(&ComplexMatrix::zeros(3)).unwrap(), 0.0);
}

#[test]
fn norms_match_singular_value_construction() {
    // Build A = U diag(sigma) V^dagger from two independently obtained
    // unitaries; its singular values are known by construction.
    let mut r = rng(18);
    let u = herm_eig(&random_hermitian(4, &mut r)).unwrap().eigenvectors;
    let v = herm_eig(&random_hermitian(4, &mut r)).unwrap().eigenvectors;
    assert!(unitarity_deviation(&u) < 1e-10);
    assert!(unitarity_deviation(&v) < 1e-10);
    let sigma = [1.7, 0.9, 0.4, 0.05];
    let a = u.matmul(&ComplexMatrix::diag(&sigma)).matmul(&v.dagger());
    let expected_half_sum = 0.5 * sigma.iter().sum::<f64>();
    assert!((trace_norm_half(&a).unwrap() - expected_half_sum).abs() < 1e-10);
    assert!((spectral_norm(&a).unwrap() - 1.7).abs() < 1e-10);
}

#[test]
fn trace_norm_half_of_density_difference_matches_oracle() {
    let mut r = rng(19);
    let rho = random_density(4, &mut r);
    let rho2 = random_density(4, &mut r);
    let delta = rho.sub(&rho2);
    // Hermitian difference: half-sum of |eigenvalues| is the oracle.
    let eig = herm_eig(&delta).unwrap();
    let expected = 0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>();
    assert!((trace_norm_half(&delta).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn spectral_norm_examples() {
    assert!((spectral_norm(&ComplexMatrix::identity(7)).unwrap() - 1.0).abs() < 1e-12);
    assert!((spectral_norm(&ComplexMatrix::diag(&[0.2, -0.7])).unwrap() - 0.7).abs() < 1e-14);
}

#[test]
fn spectral_norm_hermitian_matches_eig_oracle() {
    let mut r = rng(20);
    let m = random_hermitian(6, &mut r);
    let expected = herm_eig(&m).unwrap().spectral_radius();
    assert!((spectral_norm(&m).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn expm_matches_two_mode_rotation_oracle() {
    // Truncated-at-two-photons beam-splitter generator theta (a (x) adag -
    // adag (x) a) acts as a plane rotation on {|01>, |10>}; frozen at
    // theta = 0.7: cos = 0.7648421872844885, sin = 0.644217687237691.
    let theta = 0.7;
    let a_op = ComplexMatrix::from_fn(2, |i, j| if j == i + 1 { ONE } else { ZERO });
    let gen =
        kron(&a_op, &a_op.dagger()).sub(&kron(&a_op.dagger(), &a_op)).scale(theta);
    let v = expm(&gen, 1e-12);

    let mut expected = ComplexMatrix::identity(4);
    expected.set(1, 1, Complex64::new(0.7648421872844885, 0.0));
    expected.set(1, 2, Complex64::new(0.644217687237691, 0.0));
    expected.set(2, 1, Complex64::new(-0.644217687237691, 0.0));
    expected.set(2, 2, Complex64::new(0.7648421872844885, 0.0));
    assert!(v.max_abs_diff(&expected) < 1e-12);
}

#[test]
fn expm_of_anti_hermitian_is_unitary() {
    let mut r = rng(21);
    let h = random_hermitian(6, &mut r);
    let anti = h.scale_complex(Complex64::new(0.0, 1.0));
    let v = expm(&anti, 1e-12);
    assert!(unitarity_deviation(&v) < 1e-11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kron_associativity(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let a = random_matrix(2, &mut r);
        let b = random_matrix(3, &mut r);
        let c = random_matrix(2, &mut r);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn partial_trace_of_kron_recovers_factor(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let a = random_matrix(3, &mut r);
        let b = random_matrix(2, &mut r);
        let kept = partial_trace(&kron(&a, &b), &[3, 2], &[0]).unwrap();
        let expected = a.scale_complex(b.trace());
        prop_assert!(kept.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn mat_pow_semigroup_on_support(seed in 0u64..1_000_000, s in 0.05f64..0.95) {
        let t = (1.0 - s) * 0.7;
        let mut r = rng(seed);
        let rho = random_density(4, &mut r);
        let left = mat_pow_s(&rho, s, DEFAULT_CLAMP).unwrap()
            .matmul(&mat_pow_s(&rho, t, DEFAULT_CLAMP).unwrap());
        let right = mat_pow_s(&rho, s + t, DEFAULT_CLAMP).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-9);
    }

    #[test]
    fn trace_norm_half_triangle_inequality(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let a = random_matrix(4, &mut r);
        let b = random_matrix(4, &mut r);
        let lhs = trace_norm_half(&a.add(&b)).unwrap();
        let rhs = trace_norm_half(&a).unwrap() + trace_norm_half(&b).unwrap();
        prop_assert!(lhs <= rhs + 1e-10);
    }
}
