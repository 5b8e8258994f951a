//! Protocol-assembly checks: limit cases against closed-form channel oracles,
//! interference-block identities, block-form structure, and the composite
//! Kraus construction cross-validated against the closed-form path.

mod support;

use proptest::prelude::*;
use qi_core::channels::{apply_kraus_sum, thermal_kraus, thermal_reflect_closed};
use qi_core::linalg::{
    kron, min_eigenvalue, partial_trace, spectral_norm, Complex64, ComplexMatrix,
};
use qi_core::protocols::{
    assemble_controlled, bitflip_error_state, build_w_ico, build_w_psde, mix_bitflip,
    output_via_w, qi_output, sigma_dco, sigma_dco_with_channel, sigma_ico, sigma_psde,
    split_control_blocks, ProtocolParams,
};
use qi_core::states::control_plus;
use qi_core::CoreError;

fn params(eta: f64, p: f64, dim: usize) -> ProtocolParams {
    ProtocolParams::new(eta, 0.5, p, dim, 0.3).unwrap()
}

#[test]
fn qi_output_transparent_limit() {
    let pr = params(1.0, 1.0, 6);
    let out = qi_output(&pr, 1.0).unwrap();
    assert!(out.max_abs_diff(&pr.input_state().unwrap()) < 1e-14);
}

#[test]
fn qi_output_total_loss_factorizes() {
    let pr = params(0.1, 0.0, 5);
    let out = qi_output(&pr, 0.1).unwrap();
    // Mode A collapses to vacuum regardless of what the target did.
    let marginal_b = partial_trace(&out, &[5, 5], &[1]).unwrap();
    let expected = kron(&ComplexMatrix::basis_projector(5, 0), &marginal_b);
    assert!(out.max_abs_diff(&expected) < 1e-13);
    let other_eta = qi_output(&params(0.7, 0.0, 5), 0.7).unwrap();
    assert!(out.max_abs_diff(&other_eta) < 1e-13);
}

#[test]
fn qi_output_is_valid_state() {
    let pr = params(0.1, 0.8, 10);
    for eta_actual in [0.1, 0.0] {
        let out = qi_output(&pr, eta_actual).unwrap();
        assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(out.hermiticity_deviation() < 1e-12);
        assert!(min_eigenvalue(&out).unwrap() >= -1e-10);
    }
}

#[test]
fn sigma_ico_full_survival_reduces_to_reflection() {
    let pr = params(0.1, 1.0, 6);
    let sigma = sigma_ico(&pr, 0.1).unwrap();
    let reflected = thermal_reflect_closed(0.1, 0.5, &pr.input_state().unwrap(), 6).unwrap();
    assert!(sigma.max_abs_diff(&reflected) < 1e-12);
}

#[test]
fn interference_survives_total_loss_only_with_shared_environments() {
    let pr = params(0.1, 0.0, 6);
    let ico = sigma_ico(&pr, 0.1).unwrap();
    let psde = sigma_psde(&pr, 0.1).unwrap();
    assert!(spectral_norm(&ico).unwrap() > 0.01);
    assert!(psde.max_abs() == 0.0);

    // Continuity toward p = 0: the cross terms scale like sqrt(p).
    let near = sigma_ico(&params(0.1, 1e-6, 6), 0.1).unwrap();
    assert!(near.max_abs_diff(&ico) < 1e-2);
    let psde_near = sigma_psde(&params(0.1, 1e-6, 6), 0.1).unwrap();
    let ratio = spectral_norm(&psde_near).unwrap() / spectral_norm(&near).unwrap();
    assert!(ratio < 1e-6);
}

#[test]
fn sigma_ico_is_hermitian() {
    let sigma = sigma_ico(&params(0.1, 0.8, 8), 0.1).unwrap();
    assert!(sigma.hermiticity_deviation() <= 1e-12);
}

#[test]
fn sigma_psde_scales_quadratically_in_survival() {
    let lo = sigma_psde(&params(0.1, 0.3, 6), 0.1).unwrap();
    let hi = sigma_psde(&params(0.1, 0.7, 6), 0.1).unwrap();
    assert!(lo.scale(1.0 / 0.09).max_abs_diff(&hi.scale(1.0 / 0.49)) < 1e-14);

    let full = sigma_psde(&params(0.1, 1.0, 6), 0.1).unwrap();
    let pr = params(0.1, 1.0, 6);
    let reflected = thermal_reflect_closed(0.1, 0.5, &pr.input_state().unwrap(), 6).unwrap();
    assert!(full.max_abs_diff(&reflected) < 1e-14);
}

#[test]
fn sigma_dco_equals_sigma_ico() {
    for (eta, p) in [(0.1, 0.6), (0.05, 0.2), (0.1, 1.0)] {
        let pr = params(eta, p, 8);
        let dco = sigma_dco(&pr, eta).unwrap();
        let ico = sigma_ico(&pr, eta).unwrap();
        assert!(dco.max_abs_diff(&ico) <= 1e-12);
    }
    let dco = sigma_dco(&params(0.1, 0.5, 6), 0.1).unwrap();
    assert!(dco.hermiticity_deviation() <= 1e-10);
}

#[test]
fn sigma_dco_explicit_kraus_stays_close() {
    let pr = params(0.1, 0.7, 8);
    let reflect = thermal_kraus(0.1, 0.5, 8, 8).unwrap();
    let explicit = sigma_dco_with_channel(&pr, &reflect).unwrap();
    let closed = sigma_ico(&pr, 0.1).unwrap();
    let gap = spectral_norm(&explicit.sub(&closed)).unwrap();
    assert!(gap <= 5e-3);
    assert!(gap <= 1e-3);
}

#[test]
fn interference_norm_ordering_spot_checks() {
    for (p, eta) in [(0.3, 0.05), (0.6, 0.1), (0.9, 0.01)] {
        let pr = params(eta, p, 6);
        let ico = spectral_norm(&sigma_ico(&pr, eta).unwrap()).unwrap();
        let psde = spectral_norm(&sigma_psde(&pr, eta).unwrap()).unwrap();
        assert!(psde <= ico);
    }
}

#[test]
fn assemble_blocks_follow_definition() {
    let pr = params(0.1, 0.8, 6);
    let rho = qi_output(&pr, 0.1).unwrap();
    let sigma = sigma_ico(&pr, 0.1).unwrap();

    let neutral = assemble_controlled(&rho, &sigma, 0.0).unwrap();
    assert!(neutral.block_plus.max_abs_diff(&rho.scale(0.5)) == 0.0);
    assert!(neutral.block_minus.max_abs_diff(&rho.scale(0.5)) == 0.0);

    let coherent = assemble_controlled(&rho, &sigma, 1.0).unwrap();
    let plus = rho.add(&sigma).scale(0.5);
    let minus = rho.sub(&sigma).scale(0.5);
    assert!(coherent.block_plus.max_abs_diff(&plus) < 1e-15);
    assert!(coherent.block_minus.max_abs_diff(&minus) < 1e-15);

    // Positivity at the extreme point implies it across the whole range.
    for gamma in [0.25, 0.5, 0.75] {
        assemble_controlled(&rho, &sigma, gamma).unwrap();
    }

    let full = coherent.full_matrix();
    assert!((full.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    let blocks = split_control_blocks(&full).unwrap();
    assert!(blocks[0].max_abs_diff(&rho.scale(0.5)) < 1e-15);
    assert!(blocks[1].max_abs_diff(&sigma.scale(0.5)) < 1e-15);
}

#[test]
fn assemble_full_survival_kills_lower_block() {
    let pr = params(0.1, 1.0, 6);
    let rho = qi_output(&pr, 0.1).unwrap();
    let sigma = sigma_ico(&pr, 0.1).unwrap();
    assert!(rho.max_abs_diff(&sigma) < 1e-12);
    let cs = assemble_controlled(&rho, &sigma, 1.0).unwrap();
    assert!(cs.block_minus.max_abs() < 1e-12);
}

#[test]
fn assemble_rejects_structural_violations() {
    let rho = ComplexMatrix::diag(&[0.5, 0.5]);
    let indefinite = ComplexMatrix::diag(&[2.0, -2.0]);
    assert!(matches!(
        assemble_controlled(&rho, &indefinite, 1.0),
        Err(CoreError::PsdViolation { .. })
    ));

    let mut skew = ComplexMatrix::zeros(2);
    skew.set(0, 1, Complex64::new(0.5, 0.0));
    assert!(matches!(
        assemble_controlled(&rho, &skew, 1.0),
        Err(CoreError::NotHermitian { .. })
    ));

    let heavy = ComplexMatrix::diag(&[0.9, 0.9]);
    assert!(assemble_controlled(&heavy, &ComplexMatrix::zeros(2), 1.0).is_err());
}

#[test]
fn composite_operators_reproduce_closed_form_blocks() {
    let pr = params(0.1, 0.8, 6);
    let rho_in = pr.input_state().unwrap();
    let pairs = build_w_ico(&pr).unwrap();
    let full = output_via_w(&pairs, &control_plus(), &rho_in, 6).unwrap();
    let blocks = split_control_blocks(&full).unwrap();

    assert!(blocks[0].max_abs_diff(&blocks[3]) < 1e-12);
    assert!(blocks[1].max_abs_diff(&blocks[2].dagger()) < 1e-12);
    assert!((full.trace().re - 1.0).abs() < 5e-3);

    let rho_qi = qi_output(&pr, 0.1).unwrap();
    let sigma = sigma_ico(&pr, 0.1).unwrap();
    assert!(blocks[0].max_abs_diff(&rho_qi.scale(0.5)) < 5e-3);
    assert!(blocks[1].max_abs_diff(&sigma.scale(0.5)) < 5e-3);
}

#[test]
fn composite_operators_transparent_loss_limit() {
    let pr = params(0.9, 1.0, 6);
    let rho_in = pr.input_state().unwrap();
    let pairs = build_w_ico(&pr).unwrap();
    let blocks =
        split_control_blocks(&output_via_w(&pairs, &control_plus(), &rho_in, 6).unwrap())
            .unwrap();
    let reflected = thermal_reflect_closed(0.9, 0.5, &rho_in, 6).unwrap();
    assert!(blocks[1].max_abs_diff(&reflected.scale(0.5)) < 5e-3);
}

#[test]
fn disjoint_environment_operators_collapse_to_vacuum_term() {
    let pr = params(0.1, 0.8, 6);
    let rho_in = pr.input_state().unwrap();
    let pairs = build_w_psde(&pr).unwrap();
    let blocks =
        split_control_blocks(&output_via_w(&pairs, &control_plus(), &rho_in, 6).unwrap())
            .unwrap();

    // The six-index sum with vacuum deltas equals p'^2 E(rho) as an algebraic
    // identity for whatever Kraus set represents E: compare at 1e-12 against
    // a direct application of the same set.
    let reflect = thermal_kraus(0.1, 0.5, 6, 6).unwrap();
    let direct = apply_kraus_sum(&reflect, &rho_in, 6).unwrap().scale(0.5 * 0.64);
    assert!(blocks[1].max_abs_diff(&direct) < 1e-12);

    let sigma = sigma_psde(&pr, 0.1).unwrap();
    assert!(blocks[1].max_abs_diff(&sigma.scale(0.5)) < 5e-3);
    let rho_qi = qi_output(&pr, 0.1).unwrap();
    assert!(blocks[0].max_abs_diff(&rho_qi.scale(0.5)) < 5e-3);
    assert!(blocks[3].max_abs_diff(&rho_qi.scale(0.5)) < 5e-3);

    let dead = params(0.1, 0.0, 6);
    let pairs = build_w_psde(&dead).unwrap();
    let blocks =
        split_control_blocks(&output_via_w(&pairs, &control_plus(), &rho_in, 6).unwrap())
            .unwrap();
    assert!(blocks[1].max_abs() == 0.0);
}

#[test]
fn bitflip_error_routes_probe_to_vacuum() {
    let pr = params(0.1, 0.8, 6);
    let rho_qi = qi_output(&pr, 0.1).unwrap();
    let sigma = sigma_ico(&pr, 0.1).unwrap();
    let err = bitflip_error_state(&rho_qi, &sigma, 6).unwrap();

    assert!((err.rho_block.trace().re - 1.0).abs() < 1e-12);
    let marginal_a = partial_trace(&err.rho_block, &[6, 6], &[0]).unwrap();
    assert!(marginal_a.max_abs_diff(&ComplexMatrix::basis_projector(6, 0)) < 1e-14);
    let marginal_b = partial_trace(&err.rho_block, &[6, 6], &[1]).unwrap();
    let expected_b = partial_trace(&rho_qi, &[6, 6], &[1]).unwrap();
    assert!(marginal_b.max_abs_diff(&expected_b) < 1e-13);

    // Ancilla-traceless interference leaves no flipped-path interference.
    let balanced = kron(&ComplexMatrix::diag(&[0.5, -0.5]), &ComplexMatrix::identity(2));
    let err = bitflip_error_state(&balanced, &balanced, 2).unwrap();
    assert!(err.sigma_block.max_abs() == 0.0);
}

#[test]
fn bitflip_mixture_stays_physical() {
    let pr = params(0.1, 0.8, 6);
    let rho_qi = qi_output(&pr, 0.1).unwrap();
    let sigma = sigma_ico(&pr, 0.1).unwrap();
    let err = bitflip_error_state(&rho_qi, &sigma, 6).unwrap();

    let (rho_clean, sigma_clean) = mix_bitflip(&rho_qi, &sigma, &err, 1.0);
    assert!(rho_clean.max_abs_diff(&rho_qi) == 0.0);
    assert!(sigma_clean.max_abs_diff(&sigma) == 0.0);

    let (rho_mix, sigma_mix) = mix_bitflip(&rho_qi, &sigma, &err, 0.9);
    let cs = assemble_controlled(&rho_mix, &sigma_mix, 1.0).unwrap();
    assert!((cs.full_matrix().trace().re - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn protocol_outputs_stay_consistent(p in 0.0f64..=1.0, eta in 0.0f64..=1.0) {
        let pr = params(eta, p, 4);
        let out = qi_output(&pr, eta).unwrap();
        prop_assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(min_eigenvalue(&out).unwrap() >= -1e-10);

        let ico = sigma_ico(&pr, eta).unwrap();
        prop_assert!(ico.hermiticity_deviation() <= 1e-12);
        prop_assert!(sigma_dco(&pr, eta).unwrap().max_abs_diff(&ico) <= 1e-12);

        // The interference block saturates at the diagonal block when nothing
        // is lost; assembling at full coherence must stay positive.
        assemble_controlled(&out, &ico, 1.0).unwrap();
    }
}
