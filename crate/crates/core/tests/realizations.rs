use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use su11_core::algebra::{apply_generator_exact, basis_state};
use su11_core::group::*;
use su11_core::quadrature::{disk_inner_product, inner_product_halfline, QuadratureScheme};
use su11_core::realizations::*;
use su11_core::{Error, Generator, RepLabel};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn label(two_k: u32) -> RepLabel {
    RepLabel::new(two_k).unwrap()
}

const YS: [f64; 8] = [0.01, 0.07, 0.2, 0.45, 0.8, 1.3, 2.2, 4.0];

#[test]
fn fundamental_k1_closed_form() {
    let f = basis_halfline(label(2), 0).unwrap();
    for &y in &YS {
        let want = 4.0 * PI * y * (-2.0 * PI * y).exp();
        assert!((f.eval(y) - want).norm() < 1e-14);
    }
}

#[test]
fn basis_matches_laguerre_form() {
    // (4π)^k / √(Γ(2k)[m]_k!) y^{2k−1} e^{−2πy} P_m(y)
    use su11_core::special::{ln_gamma, log_mk_factorial, p_m};
    for tk in [2, 3, 5] {
        let k = label(tk);
        for m in 0..6 {
            let f = basis_halfline(k, m).unwrap();
            for &y in &YS {
                let ln_pref = k.k() * (4.0 * PI).ln()
                    - 0.5 * (ln_gamma(tk as f64) + log_mk_factorial(m as usize, k))
                    + (tk as f64 - 1.0) * y.ln()
                    - 2.0 * PI * y;
                let want = ln_pref.exp() * p_m(m, k, y).unwrap();
                assert!(
                    (f.eval(y).re - want).abs() < 1e-12 * want.abs().max(1e-3),
                    "2k={tk} m={m} y={y}"
                );
            }
        }
    }
}

#[test]
fn negative_index_rejected() {
    assert!(matches!(
        basis_halfline(label(2), -1),
        Err(Error::InvalidLabel(_))
    ));
    assert!(matches!(
        basis_disk(label(2), -3),
        Err(Error::InvalidLabel(_))
    ));
}

#[test]
fn basis_jet_matches_finite_differences() {
    let h = 1e-5;
    let f = basis_halfline(label(3), 4).unwrap();
    for &y in &[0.1, 0.6, 2.0] {
        let [_, d1, d2] = f.jet(y).unwrap();
        let (up, mid, dn) = (f.eval(y + h), f.eval(y), f.eval(y - h));
        assert!((d1 - (up - dn) / (2.0 * h)).norm() < 1e-6 * d1.norm().max(1.0));
        assert!((d2 - (up - 2.0 * mid + dn) / (h * h)).norm() < 1e-3 * d2.norm().max(1.0));
    }
}

#[test]
fn basis_is_orthonormal() {
    let scheme = QuadratureScheme::default();
    let k = label(3);
    for m in 0..6 {
        for n in m..6 {
            let v = inner_product_halfline(
                &basis_halfline(k, m).unwrap(),
                &basis_halfline(k, n).unwrap(),
                &scheme,
            )
            .unwrap()
            .value;
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-9, "m={m} n={n}: {v}");
        }
    }
}

/// Differential generator actions agree with the ladder algebra.
#[test]
fn generator_actions_match_coefficients() {
    for tk in [2, 3] {
        let k = label(tk);
        for m in 0..4 {
            let f = basis_halfline(k, m).unwrap();
            let s = basis_state(k, m as usize, m as usize + 1).unwrap();
            for op in [
                Generator::J0,
                Generator::J1,
                Generator::J2,
                Generator::A,
                Generator::B,
            ] {
                let g = generator_action_halfline(op, k, &f).unwrap();
                let want = apply_generator_exact(op, &s).to_halfline();
                for &y in &YS {
                    let (got, w) = (g.eval(y), want.eval(y));
                    assert!(
                        (got - w).norm() < 1e-10 * w.norm().max(1.0),
                        "2k={tk} m={m} {op} y={y}: {got} vs {w}"
                    );
                }
            }
        }
    }
}

#[test]
fn generator_action_needs_jet() {
    let k = label(2);
    let f = basis_halfline(k, 1).unwrap();
    let plain = HalfLineFunction::from_fn(k, f.hints().clone(), move |y| f.eval(y));
    assert!(matches!(
        generator_action_halfline(Generator::J0, k, &plain),
        Err(Error::MissingDerivative)
    ));
    assert!(generator_action_halfline(Generator::A, k, &plain).is_ok());
}

#[test]
fn affine_coherent_state_is_transported_fundamental() {
    let k = label(3);
    let fundamental = basis_halfline(k, 0).unwrap();
    for &(a, b) in &[(1.0, 0.0), (0.4, 1.1), (2.5, -0.7)] {
        let m0 = AffineElement::new(a, b).unwrap();
        let direct = affine_cs_halfline(k, &m0);
        let moved = affine_action(k, &m0, &fundamental);
        for &y in &YS {
            assert!(
                (direct.eval(y) - moved.eval(y)).norm() < 1e-12 * direct.eval(y).norm().max(1e-3)
            );
        }
    }
}

#[test]
fn affine_and_perelomov_states_differ_by_a_phase() {
    let k = label(2);
    for &zeta in &[c(0.3, 0.2), c(-0.5, -0.4), c(0.0, 0.7)] {
        let (m0, _) = zeta_to_affine(zeta).unwrap();
        let ab = affine_cs_halfline(k, &m0);
        let z = coherent_halfline(k, zeta).unwrap();
        let ratio0 = ab.eval(YS[0]) / z.eval(YS[0]);
        assert!((ratio0.norm() - 1.0).abs() < 1e-12);
        for &y in &YS[1..] {
            assert!(
                (ab.eval(y) / z.eval(y) - ratio0).norm() < 1e-10,
                "ζ={zeta} y={y}"
            );
        }
    }
}

#[test]
fn coherent_state_routes_agree() {
    let k = label(3);
    let zeta = c(0.4, -0.3);
    let f = coherent_halfline(k, zeta).unwrap();
    for &y in &YS {
        let v = f.eval(y);
        let g = coherent_generating_halfline(k, zeta, y).unwrap();
        let s = coherent_expansion_halfline(k, zeta, 200, y).unwrap();
        assert!((g - v).norm() < 1e-12 * v.norm().max(1.0));
        assert!((s - v).norm() < 1e-12 * v.norm().max(1.0));
    }
}

#[test]
fn laplace_intertwiner_maps_basis() {
    let scheme = QuadratureScheme::default();
    for tk in [2, 3, 4] {
        let k = label(tk);
        for m in 0..5 {
            let f = basis_halfline(k, m).unwrap();
            let h = basis_halfplane(k, m).unwrap();
            for &w in &[c(1.0, 0.0), c(0.5, 1.5), c(2.0, -0.8)] {
                let got = laplace_intertwiner(k, &f, w, &scheme).unwrap();
                assert!((got - h.eval(w)).norm() < 1e-9, "2k={tk} m={m} w={w}");
            }
        }
    }
    let f = basis_halfline(label(2), 0).unwrap();
    assert!(matches!(
        laplace_intertwiner(label(2), &f, c(0.0, 1.0), &scheme),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn cayley_pullback_maps_basis_and_coherent_states() {
    let k = label(3);
    let pts = [c(0.0, 0.0), c(0.3, 0.4), c(-0.7, 0.1), c(0.05, -0.9)];
    for m in 0..6 {
        let pulled = cayley_pullback(k, &basis_halfplane(k, m).unwrap());
        let disk = basis_disk(k, m).unwrap();
        for &z in &pts {
            assert!((pulled.eval(z) - disk.eval(z)).norm() < 1e-10 * disk.eval(z).norm().max(1.0));
        }
    }
    let zeta = c(0.2, -0.5);
    let pulled = cayley_pullback(k, &coherent_halfplane(k, zeta).unwrap());
    let disk = coherent_disk(k, zeta).unwrap();
    for &z in &pts {
        assert!((pulled.eval(z) - disk.eval(z)).norm() < 1e-10 * disk.eval(z).norm().max(1.0));
    }
}

#[test]
fn disk_basis_is_orthonormal() {
    let scheme = QuadratureScheme::default();
    let k = label(3);
    for m in 0..4 {
        for n in 0..4 {
            let v = disk_inner_product(
                k,
                &basis_disk(k, m).unwrap(),
                &basis_disk(k, n).unwrap(),
                &scheme,
            )
            .unwrap()
            .value;
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-9, "m={m} n={n}: {v}");
        }
    }
}

#[test]
fn disk_coherent_state_expansion() {
    // |ζ⟩ = Σ c_m |km⟩ pointwise on the disk.
    let k = label(2);
    let zeta = c(0.3, 0.45);
    let coeffs = su11_core::algebra::coherent_prefix(k, zeta, 150).unwrap();
    let f = coherent_disk(k, zeta).unwrap();
    for &z in &[c(0.0, 0.0), c(0.5, -0.2), c(-0.3, 0.6)] {
        let sum: Complex64 = coeffs
            .iter()
            .enumerate()
            .map(|(m, cm)| cm * basis_disk(k, m as i64).unwrap().eval(z))
            .sum();
        assert!((sum - f.eval(z)).norm() < 1e-12 * f.eval(z).norm().max(1.0));
    }
}

#[test]
fn halfplane_action_intertwines_with_disk_action() {
    let k = label(2);
    let g = Sl2rElement::new(1.3, 0.4, -0.2, (1.0 - 0.4 * 0.2) / 1.3).unwrap();
    let h = basis_halfplane(k, 2).unwrap();
    let left = cayley_pullback(k, &halfplane_action(k, &g, &h));
    let right = disk_action(k, &sl2r_to_su11(&g), &cayley_pullback(k, &h));
    for &z in &[c(0.1, 0.2), c(-0.4, 0.3), c(0.6, -0.6)] {
        let (l, r) = (left.eval(z), right.eval(z));
        assert!(
            (l - r).norm().min((l + r).norm()) < 1e-12 * l.norm().max(1.0),
            "z={z}: {l} vs {r}"
        );
    }
}

#[test]
fn linear_combination_is_pointwise() {
    let k = label(2);
    let f = basis_halfline(k, 0).unwrap();
    let g = basis_halfline(k, 3).unwrap();
    let h = linear_combination(k, &[(c(2.0, 0.0), f.clone()), (c(0.0, -1.5), g.clone())]);
    for &y in &YS {
        assert!((h.eval(y) - (2.0 * f.eval(y) - c(0.0, 1.5) * g.eval(y))).norm() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn affine_action_is_a_representation(
        a1 in 0.2f64..4.0, b1 in -3.0f64..3.0, a2 in 0.2f64..4.0, b2 in -3.0f64..3.0, y in 0.01f64..3.0,
    ) {
        let k = label(3);
        let f = basis_halfline(k, 2).unwrap();
        let m1 = AffineElement::new(a1, b1).unwrap();
        let m2 = AffineElement::new(a2, b2).unwrap();
        let twice = affine_action(k, &m1, &affine_action(k, &m2, &f));
        let once = affine_action(k, &m1.compose(&m2), &f);
        let (u, v) = (twice.eval(y), once.eval(y));
        prop_assert!((u - v).norm() < 1e-11 * u.norm().max(1.0));
    }

    #[test]
    fn affine_action_is_unitary(a in 0.3f64..3.0, b in -2.0f64..2.0, m in 0i64..4) {
        let k = label(2);
        let f = affine_action(k, &AffineElement::new(a, b).unwrap(), &basis_halfline(k, m).unwrap());
        let n = f.norm(&QuadratureScheme::default()).unwrap();
        prop_assert!((n - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disk_action_is_a_representation(
        t1 in 0.0f64..1.5, p1 in 0.0f64..6.3, t2 in 0.0f64..1.5, p2 in 0.0f64..6.3,
        r in 0.0f64..0.9, phi in 0.0f64..6.3,
    ) {
        let k = label(3);
        let g = displacement_matrix(&DisplacementParams::new(t1, p1));
        let h = displacement_matrix(&DisplacementParams::new(t2, p2));
        let f = basis_disk(k, 1).unwrap();
        let z = Complex64::from_polar(r, phi);
        let twice = disk_action(k, &g, &disk_action(k, &h, &f)).eval(z);
        let gh = disk_action(k, &compose(&g, &h), &f).eval(z);
        let hg = disk_action(k, &compose(&h, &g), &f).eval(z);
        let err = (twice - gh).norm().min((twice - hg).norm()).min((twice + gh).norm()).min((twice + hg).norm());
        prop_assert!(err < 1e-9 * twice.norm().max(1.0));
    }
}
