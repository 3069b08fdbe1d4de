//! Randomized properties over generated states.

use gdistill::protocol::{concentrate_with_retries, find_npt_witness};
use gdistill::random::{random_state, StateKind};
use gdistill::symplectic::random_local_symplectic;
use gdistill::{
    is_npt, partial_transpose, standard_form_params, validate_physical, wigner_cm, CorrelationMatrix,
    DEFAULT_TOL,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = StateKind> {
    prop_oneof![Just(StateKind::Thermal), Just(StateKind::Entangled), Just(StateKind::Boundary)]
}

fn state() -> impl Strategy<Value = CorrelationMatrix> {
    (1usize..=3, 1usize..=3, any::<u64>(), kind())
        .prop_map(|(a, b, seed, k)| random_state(a, b, seed, k).unwrap())
}

fn pt_gap(g: &CorrelationMatrix) -> f64 {
    partial_transpose(g).symplectic_eigenvalues().unwrap()[0] - 1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_states_are_physical(g in state()) {
        let v = validate_physical(&g, DEFAULT_TOL).unwrap();
        prop_assert!(v.physical);
        prop_assert!(v.min_symplectic_eigenvalue >= 1.0 - 1e-9);
    }

    #[test]
    fn shrinking_below_the_vacuum_is_unphysical(g in state(), f in 0.05f64..0.9) {
        // scaling by f < 1 pushes the smallest symplectic eigenvalue below
        // f ⋅ ν_min ≤ f; generated states have ν_min ≤ 3
        let nu = g.symplectic_eigenvalues().unwrap()[0];
        prop_assume!(f * nu < 1.0 - 1e-6);
        let shrunk = CorrelationMatrix::new(g.entries() * f, g.n_a(), g.n_b()).unwrap();
        let v = validate_physical(&shrunk, DEFAULT_TOL).unwrap();
        prop_assert!(!v.physical);
        prop_assert!(v.margin < 0.0);
    }

    #[test]
    fn npt_is_local_invariant(g in state(), seed in any::<u64>()) {
        prop_assume!(pt_gap(&g).abs() > 1e-7);
        let s = random_local_symplectic(g.n_a(), g.n_b(), seed).unwrap();
        prop_assert_eq!(
            is_npt(&g, DEFAULT_TOL).unwrap().npt,
            is_npt(&g.transform(&s).unwrap(), DEFAULT_TOL).unwrap().npt
        );
    }

    #[test]
    fn swapping_sides_preserves_npt(g in state()) {
        prop_assume!(pt_gap(&g).abs() > 1e-7);
        prop_assert_eq!(
            is_npt(&g, DEFAULT_TOL).unwrap().npt,
            is_npt(&g.swap_sides(), DEFAULT_TOL).unwrap().npt
        );
    }

    #[test]
    fn wigner_map_is_an_involution(g in state()) {
        let twice = wigner_cm(&wigner_cm(&g).unwrap()).unwrap();
        prop_assert!((twice.entries() - g.entries()).abs().max() < 1e-10);
    }

    #[test]
    fn standard_form_is_a_local_invariant(seed in any::<u64>(), local in any::<u64>()) {
        let g = random_state(1, 1, seed, StateKind::Entangled).unwrap();
        let h = g.transform(&random_local_symplectic(1, 1, local).unwrap()).unwrap();
        let (p, q) = (standard_form_params(&g).unwrap(), standard_form_params(&h).unwrap());
        prop_assert!(p.max_abs_diff(&q) < 1e-8 * p.n_a.max(p.n_b), "{:?} vs {:?}", p, q);
    }

    #[test]
    fn concentration_keeps_one_by_one_invariants(seed in any::<u64>()) {
        let g = random_state(1, 1, seed, StateKind::Entangled).unwrap();
        prop_assume!(pt_gap(&g) < -1e-7);
        let (_, c) = concentrate_with_retries(&g, DEFAULT_TOL, seed).unwrap();
        let p = standard_form_params(&g).unwrap();
        let q = standard_form_params(&c.gamma_red).unwrap();
        prop_assert!(p.max_abs_diff(&q) < 1e-8 * p.n_a.max(p.n_b));
    }

    #[test]
    fn witness_restriction_identity(a in 1usize..=3, b in 1usize..=3, seed in any::<u64>()) {
        let g = random_state(a, b, seed, StateKind::Entangled).unwrap();
        prop_assume!(pt_gap(&g) < -1e-7);
        let (_, c) = concentrate_with_retries(&g, DEFAULT_TOL, seed).unwrap();
        prop_assert!(c.leakage <= 1e-6);
        prop_assert!((c.form_full - c.form_reduced).abs() < 1e-10 * c.form_full.abs().max(1.0));
        prop_assert!(c.form_reduced < 0.0);
    }

    #[test]
    fn witness_is_the_most_negative_direction(seed in any::<u64>()) {
        let g = random_state(2, 2, seed, StateKind::Entangled).unwrap();
        prop_assume!(pt_gap(&g) < -1e-7);
        let w = find_npt_witness(&g, DEFAULT_TOL).unwrap();
        let v = is_npt(&g, DEFAULT_TOL).unwrap();
        prop_assert!(w.margin < -w.epsilon / 2.0);
        // no unit vector beats the smallest eigenvalue
        prop_assert!(w.margin >= v.margin - 1e-12 * v.margin.abs().max(1.0));
    }
}

#[test]
fn partial_transpose_flips_only_b_momenta() {
    let g = random_state(2, 1, 5, StateKind::Entangled).unwrap();
    let pt = partial_transpose(&g);
    let sign = [1.0, 1.0, 1.0, 1.0, 1.0, -1.0];
    let expected = DMatrix::from_fn(6, 6, |i, j| sign[i] * sign[j] * g.entries()[(i, j)]);
    assert_eq!(pt.entries(), &expected);
}
