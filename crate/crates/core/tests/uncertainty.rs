use num_complex::Complex64;
use proptest::prelude::*;
use su11_core::algebra::{basis_state, coherent_coeffs, coherent_coeffs_fine, CoeffState};
use su11_core::group::AffineElement;
use su11_core::uncertainty::*;
use su11_core::{Error, Generator, RepLabel};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn label(two_k: u32) -> RepLabel {
    RepLabel::new(two_k).unwrap()
}

const PAIRS: [(Generator, Generator); 4] = [
    (Generator::J1, Generator::J2),
    (Generator::J0, Generator::J1),
    (Generator::J0, Generator::J2),
    (Generator::A, Generator::B),
];

#[test]
fn fundamental_state_j1_j2() {
    for tk in 2..6 {
        let k = label(tk);
        let kk = k.k();
        let r = report(
            (Generator::J1, Generator::J2),
            &basis_state(k, 0, 0).unwrap(),
        )
        .unwrap();
        assert!((r.delta1 - kk / 2.0).abs() < 1e-14);
        assert!((r.delta2 - kk / 2.0).abs() < 1e-14);
        assert!(r.delta12.abs() < 1e-14);
        assert!((r.commutator_mean - kk).abs() < 1e-14);
        assert!(r.residual_inc2.abs() < 1e-13);
    }
}

#[test]
fn first_excited_state_is_strict() {
    for tk in 2..6 {
        let k = label(tk);
        let r = report(
            (Generator::J1, Generator::J2),
            &basis_state(k, 1, 4).unwrap(),
        )
        .unwrap();
        assert!(r.residual_inc2 > 0.1 * k.k());
    }
}

#[test]
fn real_zeta_saturates_usual_relation() {
    let k = label(3);
    for x in [-0.7, -0.2, 0.3, 0.8] {
        let r = report(
            (Generator::J1, Generator::J2),
            &coherent_coeffs_fine(k, c(x, 0.0)).unwrap(),
        )
        .unwrap();
        assert!(r.delta12.abs() < 1e-9, "ζ={x}");
        assert!(r.residual_inc2.abs() < 1e-9, "ζ={x}");
    }
}

#[test]
fn j0_j2_on_real_zeta_reports_both_relations() {
    let k = label(2);
    let r = report(
        (Generator::J0, Generator::J2),
        &coherent_coeffs_fine(k, c(0.5, 0.0)).unwrap(),
    )
    .unwrap();
    assert!(r.residual_inc1.abs() < 1e-9);
    assert!(r.residual_inc2 >= -1e-9);
}

#[test]
fn coherent_states_saturate_generalized_relation() {
    let k = label(2);
    for &z in &[c(0.0, 0.0), c(0.4, 0.3), c(-0.6, 0.1), c(0.0, 0.5)] {
        let s = coherent_coeffs_fine(k, z).unwrap();
        for pair in PAIRS {
            let r = report(pair, &s).unwrap();
            assert!(
                r.residual_inc1.abs() < 1e-9,
                "ζ={z} {pair:?}: {}",
                r.residual_inc1
            );
            assert!(r.saturation_residual < 1e-9, "ζ={z} {pair:?}");
        }
    }
}

#[test]
fn affine_lambda_is_a_minus_ib() {
    let k = label(2);
    for &(a, b) in &[(2.0, 3.0), (0.5, -1.0)] {
        let m0 = AffineElement::new(a, b).unwrap();
        let s = coherent_coeffs_fine(k, su11_core::group::affine_to_zeta(&m0)).unwrap();
        let r = report((Generator::B, Generator::A), &s).unwrap();
        assert!(
            (r.lambda - c(a, -b)).norm() < 1e-9,
            "({a},{b}): {}",
            r.lambda
        );
        let r = report((Generator::A, Generator::B), &s).unwrap();
        assert!((r.lambda + 1.0 / c(a, -b)).norm() < 1e-9);
    }
}

#[test]
fn saturation_examples() {
    let k = label(2);
    let at_origin = saturation_residuals(c(0.0, 0.0), k).unwrap();
    assert!(at_origin[0].residual.unwrap() < 1e-10);
    for z in [c(0.5, 0.0), c(0.0, 0.5)] {
        for chk in saturation_residuals(z, k).unwrap() {
            assert!(chk.residual.unwrap() < 1e-9, "ζ={z} {}", chk.name);
        }
    }
    let r = report(
        (Generator::J1, Generator::J2),
        &coherent_coeffs_fine(k, c(0.0, 0.5)).unwrap(),
    )
    .unwrap();
    assert!(r.delta12.abs() < 1e-9);
}

#[test]
fn commutator_routes_agree() {
    let k = label(3);
    let s = coherent_coeffs(k, c(0.3, -0.4), None).unwrap();
    for pair in PAIRS {
        let r = report(pair, &s).unwrap();
        assert!(
            (r.commutator_mean - r.commutator_shortcut).abs() < 1e-10,
            "{pair:?}"
        );
    }
}

#[test]
fn report_errors() {
    let k = label(2);
    let s = basis_state(k, 0, 2).unwrap().scaled(c(3.0, 0.0));
    assert!(matches!(
        report((Generator::J1, Generator::J2), &s),
        Err(Error::NotNormalized(_))
    ));
    let s = basis_state(k, 0, 2).unwrap();
    assert!(report((Generator::Jplus, Generator::J2), &s).is_err());
}

#[test]
fn uncorrelated_pairs() {
    let k = label(2);
    let p = uncorrelated_pair_affine(&AffineElement::new(1.7, 0.0).unwrap(), k).unwrap();
    assert_eq!(p.second, (0.0, 1.0 / 1.7));
    assert!(p.correlation.abs() < 1e-9);
    let p = uncorrelated_pair_affine(&AffineElement::new(2.0, 3.0).unwrap(), k).unwrap();
    assert_eq!(p.second, (1.5, 0.5));
    assert!(p.correlation.abs() < 1e-9);
    let p = uncorrelated_pair_zeta(c(0.45, 0.0), k, (Generator::J1, Generator::J2)).unwrap();
    assert!(p.second.0.abs() < 1e-9);
    assert!(p.correlation.abs() < 1e-9);
    let p = uncorrelated_pair_zeta(c(0.3, 0.4), k, (Generator::J0, Generator::J1)).unwrap();
    assert!(p.correlation.abs() < 1e-9);
}

fn arb_state() -> impl Strategy<Value = CoeffState> {
    (
        2u32..6,
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..16),
    )
        .prop_filter_map("zero state", |(tk, v)| {
            let s = CoeffState::new(label(tk), v.into_iter().map(|(r, i)| c(r, i)).collect());
            (s.norm() > 1e-3).then(|| s.normalized())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generalized_relation_holds(s in arb_state()) {
        for pair in PAIRS {
            let r = report(pair, &s).unwrap();
            prop_assert!(r.residual_inc1 >= -1e-9, "{:?}: {}", pair, r.residual_inc1);
            prop_assert!(r.residual_inc2 >= r.residual_inc1 - 1e-9);
        }
    }
}
