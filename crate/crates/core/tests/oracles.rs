//! Independent oracles: Fock-basis series, hyperbolic closed forms and
//! Williamson constructions checked against the matrix-level routines.

use approx::assert_relative_eq;
use gdistill::gaussian::{beam_splitter, lossy_channel};
use gdistill::two_mode::standard_form_cm;
use gdistill::{
    condition_on_x_measurement, distill_pipeline, is_npt, rc_value, standard_form_params,
    standard_form_transform, symmetrize, tmss_cm, validate_physical, wigner_cm, CorrelationMatrix,
    PipelineOptions, StdFormParams, SymplecticMatrix, Verdict, DEFAULT_TOL,
};
use nalgebra::DMatrix;

/// `⟨ψ₂| tr_B ρ₁ ⊗ 1 - ρ₁ |ψ₂⟩` for two-mode squeezed vacua written as
/// `Σ tⁿ|nn⟩ / cosh r`, summed term by term in the Fock basis.
fn fock_rc(r1: f64, r2: f64) -> f64 {
    let (c1, t1) = (r1.cosh(), r1.tanh());
    let (c2, t2) = (r2.cosh(), r2.tanh());
    let mut amplitude = 0.0;
    let mut reduced = 0.0;
    for n in 0..20_000 {
        let term = (t1 * t2).powi(n);
        amplitude += term;
        reduced += term * term;
        if term * term < 1e-30 && term < 1e-18 {
            break;
        }
    }
    let overlap = (amplitude / (c1 * c2)).powi(2);
    reduced / (c1 * c1 * c2 * c2) - overlap
}

#[test]
fn reduction_criterion_matches_fock_series() {
    for &(r1, r2) in &[(0.3, 0.3), (0.5, 1.0), (1.0, 0.25), (0.8, 2.0), (0.1, 1.5)] {
        let expected = fock_rc(r1, r2);
        let got = rc_value(&tmss_cm(r1).unwrap(), r2).unwrap().value;
        assert_relative_eq!(got, expected, epsilon = 1e-11, max_relative = 1e-9);
        assert!(got < 0.0, "pure entangled states violate the reduction criterion");
    }
}

#[test]
fn reduction_criterion_vanishes_on_product_states() {
    // vacuum: ⟨ψ|ρ_A ⊗ 1|ψ⟩ = |⟨00|ψ⟩|² = ⟨ψ|ρ|ψ⟩
    let vac = CorrelationMatrix::vacuum(1, 1).unwrap();
    for r in [0.5, 1.0, 3.0] {
        assert!(rc_value(&vac, r).unwrap().value.abs() < 1e-14);
    }
}

#[test]
fn lossy_tmss_matches_closed_form() {
    for &(r, eta) in &[(0.5, 0.5), (0.2, 0.9), (1.0, 0.1)] {
        let g = lossy_channel(&tmss_cm(r).unwrap(), 1, eta).unwrap();
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let b = eta * c + 1.0 - eta;
        let k = eta.sqrt() * s;
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[c, 0.0, k, 0.0, 0.0, c, 0.0, -k, k, 0.0, b, 0.0, 0.0, -k, 0.0, b],
        );
        assert!((g.entries() - expected).abs().max() < 1e-13);
    }
}

#[test]
fn attenuated_tmss_symmetrizes_with_the_predicted_scaling() {
    let c = 1.0_f64.cosh();
    let k = 0.5_f64.sqrt() * 1.0_f64.sinh();
    let b = 0.5 * c + 0.5;
    let g = CorrelationMatrix::new(
        DMatrix::from_row_slice(4, 4, &[c, 0.0, k, 0.0, 0.0, c, 0.0, -k, k, 0.0, b, 0.0, 0.0, -k, 0.0, b]),
        1,
        1,
    )
    .unwrap();
    // same state built as a beam splitter against a vacuum environment
    let env = CorrelationMatrix::new(
        DMatrix::from_fn(6, 6, |i, j| if i < 4 && j < 4 { tmss_cm(0.5).unwrap().entries()[(i, j)] } else if i == j { 1.0 } else { 0.0 }),
        1,
        2,
    )
    .unwrap();
    let mixed = env.transform(&beam_splitter(3, 1, 2, std::f64::consts::FRAC_PI_4).unwrap()).unwrap();
    let traced = gdistill::reduce_to_modes(&mixed, &[0], &[0]).unwrap();
    assert!((traced.entries() - g.entries()).abs().max() < 1e-13);

    let rep = symmetrize(&g, DEFAULT_TOL).unwrap();
    assert!(rep.theta > 0.0 && rep.theta < std::f64::consts::FRAC_PI_2);
    // the ancilla goes to the side with the smaller Wigner N
    assert_eq!(rep.swapped_sides, rep.wigner_in.n_a < rep.wigner_in.n_b);
    assert!((rep.params_out.n_a - rep.params_out.n_b).abs() < 1e-8);
    let n_b = rep.wigner_in.n_a.min(rep.wigner_in.n_b);
    assert_relative_eq!(rep.scale_factor, 1.0 / (n_b * rep.theta.tan().powi(2) + 1.0), max_relative = 1e-14);
    assert_relative_eq!(
        rep.insep_residual_out,
        rep.insep_residual_in * rep.scale_factor,
        max_relative = 1e-8
    );
    assert!(is_npt(&rep.gamma_out().unwrap(), DEFAULT_TOL).unwrap().npt);
}

#[test]
fn pure_states_are_self_dual() {
    for r in [0.0, 0.4, 1.3] {
        let t = tmss_cm(r).unwrap();
        let w = wigner_cm(&t).unwrap();
        assert!((w.entries() - t.entries()).abs().max() < 1e-12);
    }
}

#[test]
fn williamson_spectrum_is_recovered() {
    let nus = [1.0, 1.7, 2.5, 4.0];
    let mut d = DMatrix::zeros(8, 8);
    for (k, nu) in nus.iter().enumerate() {
        d[(2 * k, 2 * k)] = *nu;
        d[(2 * k + 1, 2 * k + 1)] = *nu;
    }
    let s: SymplecticMatrix = gdistill::random_symplectic(4, 99).unwrap();
    let g = CorrelationMatrix::new(s.congruence(&d), 2, 2).unwrap();
    let got = g.symplectic_eigenvalues().unwrap();
    for (a, b) in got.iter().zip(nus) {
        assert_relative_eq!(*a, b, max_relative = 1e-10);
    }
    assert!(validate_physical(&g, DEFAULT_TOL).unwrap().physical);
}

#[test]
fn homodyne_on_tmss_leaves_squeezed_thermal_marginal() {
    // conditioning B's x on a TMSS with k = sinh 2r, n = cosh 2r leaves A with
    // x variance n - k²/n = 1/n and untouched p variance n
    for r in [0.3_f64, 0.5, 1.1] {
        let n = (2.0 * r).cosh();
        let out = condition_on_x_measurement(&tmss_cm(r).unwrap(), 1).unwrap();
        assert_relative_eq!(out.entries()[(0, 0)], 1.0 / n, max_relative = 1e-12);
        assert_relative_eq!(out.entries()[(1, 1)], n, max_relative = 1e-12);
    }
}

#[test]
fn standard_form_recovers_hand_built_parameters() {
    let p = StdFormParams::new(2.0, 1.5, 1.1, -0.9);
    let g = standard_form_cm(&p).unwrap();
    let scrambled = g.transform(&gdistill::symplectic::random_local_symplectic(1, 1, 4).unwrap()).unwrap();
    let got = standard_form_params(&scrambled).unwrap();
    assert!(got.max_abs_diff(&p) < 1e-10, "{got:?}");
    let sf = standard_form_transform(&scrambled).unwrap();
    let back = scrambled.transform(&sf.s_a.direct_sum(&sf.s_b)).unwrap();
    assert!((back.entries() - sf.gamma_std.entries()).abs().max() < 1e-10);
}

#[test]
fn symmetric_npt_state_takes_the_trivial_symmetrization_path() {
    let p = StdFormParams::new(1.5, 1.5, 1.0, -0.8);
    let report = distill_pipeline(&standard_form_cm(&p).unwrap(), &PipelineOptions::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Distillable);
    assert_eq!(report.symmetrization.as_ref().unwrap().theta, 0.0);
    assert!(report.final_params.unwrap().max_abs_diff(&p) < 1e-10);
}
