//! Property tests for the engine invariants: symplectic invariance,
//! physicality preservation, overlap normalization, and the TMSV
//! log-negativity closed form.

use nalgebra::DMatrix;
use proptest::prelude::*;

use cvclone_core::phase_space::{
    duan_zeta, gaussian_overlap, log_negativity, min_symplectic_eigenvalue,
};
use cvclone_core::{states, GaussianState, SymplecticMap};

/// One random circuit element on `n` modes.
#[derive(Debug, Clone)]
enum Element {
    Squeeze { mode: usize, r: f64 },
    Split { i: usize, j: usize, tau: f64 },
    Flip { mode: usize },
}

fn element(n: usize) -> impl Strategy<Value = Element> {
    prop_oneof![
        (0..n, -0.8f64..0.8).prop_map(|(mode, r)| Element::Squeeze { mode, r }),
        (0..n, 0..n, 0.0f64..1.0).prop_filter_map("distinct modes", |(i, j, tau)| {
            (i != j).then_some(Element::Split { i, j, tau })
        }),
        (0..n).prop_map(|mode| Element::Flip { mode }),
    ]
}

fn pipeline(n: usize) -> impl Strategy<Value = Vec<Element>> {
    prop::collection::vec(element(n), 1..8)
}

fn build_map(n: usize, elements: &[Element]) -> SymplecticMap {
    let mut map = SymplecticMap::identity(n);
    for e in elements {
        let next = match e {
            Element::Squeeze { mode, r } => SymplecticMap::squeezer(n, *mode, *r).unwrap(),
            Element::Split { i, j, tau } => SymplecticMap::beam_splitter(n, *i, *j, *tau).unwrap(),
            Element::Flip { mode } => SymplecticMap::phase_flip(n, *mode).unwrap(),
        };
        map = next.after(&map).unwrap();
    }
    map
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_pipelines_are_symplectic(elements in pipeline(3)) {
        let map = build_map(3, &elements);
        prop_assert!(map.is_symplectic(1e-10));
    }

    #[test]
    fn determinant_invariant_under_zero_shift_maps(r in 0.0f64..0.9, elements in pipeline(3)) {
        let state = states::tmsv(r).tensor(&GaussianState::vacuum(1).unwrap());
        let out = state.apply(&build_map(3, &elements)).unwrap();
        let before = state.cov().determinant();
        let after = out.cov().determinant();
        prop_assert!((before - after).abs() < 1e-10 * before.abs().max(1.0));
    }

    #[test]
    fn physicality_preserved_by_pipelines(r in 0.0f64..0.9, elements in pipeline(3)) {
        let state = states::tmsv(r).tensor(&GaussianState::vacuum(1).unwrap());
        let out = state.apply(&build_map(3, &elements)).unwrap();
        prop_assert!(min_symplectic_eigenvalue(out.cov()) >= 1.0 - 1e-9);
    }

    #[test]
    fn pure_states_have_unit_self_overlap(r in 0.0f64..0.9, elements in pipeline(2)) {
        let state = states::tmsv(r).apply(&build_map(2, &elements)).unwrap();
        prop_assert!((state.cov().determinant() - 1.0).abs() < 1e-8);
        let self_overlap = gaussian_overlap(&state, &state).unwrap();
        prop_assert!((self_overlap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overlap_never_exceeds_one(
        r1 in 0.0f64..0.8,
        r2 in 0.0f64..0.8,
        dx in -2.0f64..2.0,
        elements in pipeline(2),
    ) {
        let a = states::tmsv(r1).apply(&build_map(2, &elements)).unwrap();
        let b = states::tmsv(r2).displace(0, dx, 0.0).unwrap();
        let overlap = gaussian_overlap(&a, &b).unwrap();
        prop_assert!(overlap <= 1.0 + 1e-12);
        prop_assert!(overlap >= 0.0);
    }

    #[test]
    fn tmsv_log_negativity_closed_form(r in 0.0f64..2.0) {
        let e = log_negativity(&states::tmsv(r)).unwrap();
        prop_assert!((e - 2.0 * r / std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn duan_zeta_invariant_under_common_displacement(
        r in 0.0f64..1.0,
        dx in -3.0f64..3.0,
        dp in -3.0f64..3.0,
    ) {
        let t = states::tmsv(r);
        let d = t.displace(0, dx, dp).unwrap().displace(1, dx, dp).unwrap();
        let before = duan_zeta(&t, 0, 1).unwrap();
        let after = duan_zeta(&d, 0, 1).unwrap();
        prop_assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn asymmetric_resource_is_pure_and_physical(
        r in 0.0f64..1.0,
        taus in prop::collection::vec(0.02f64..0.98, 1..5),
    ) {
        let state = states::asymmetric_resource(r, &taus).unwrap();
        prop_assert!((state.purity() - 1.0).abs() < 1e-8);
        prop_assert!(min_symplectic_eigenvalue(state.cov()) >= 1.0 - 1e-9);
    }
}

#[test]
fn identity_map_has_identity_matrix() {
    let map = SymplecticMap::identity(2);
    assert_eq!(map.matrix, DMatrix::identity(4, 4));
}
