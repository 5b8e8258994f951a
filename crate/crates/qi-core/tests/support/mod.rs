//! Deterministic random-matrix builders shared by the integration tests.
#![allow(dead_code)] // each test binary uses a different subset

use qi_core::linalg::{Complex64, ComplexMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = random_matrix(dim, rng);
    g.add(&g.dagger()).scale(0.5)
}

/// Random full-rank density matrix G G^dagger / Tr.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = random_matrix(dim, rng);
    let h = g.matmul(&g.dagger());
    let tr = h.trace().re;
    h.scale(1.0 / tr)
}

/// Max elementwise deviation from the identity of U^dagger U.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    u.dagger().matmul(u).max_abs_diff(&ComplexMatrix::identity(u.dim))
}
