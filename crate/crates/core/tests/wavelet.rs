use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use su11_core::group::{zeta_to_affine, AffineElement};
use su11_core::morse::{morse_family, morse_fundamental};
use su11_core::quadrature::QuadratureScheme;
use su11_core::realizations::{
    affine_action, affine_cs_halfline, basis_halfline, coherent_halfline, linear_combination,
    HalfLineFunction, ShapeHints,
};
use su11_core::wavelet::*;
use su11_core::{Error, RepLabel};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn label(two_k: u32) -> RepLabel {
    RepLabel::new(two_k).unwrap()
}

/// `(σ_{a₀b₀}, σ_ab) = (2√(a₀a))^{2k} / (a₀ + a − i(b − b₀))^{2k}` for the
/// fundamental fiducial.
fn fundamental_overlap(k: RepLabel, (a0, b0): (f64, f64), (a, b): (f64, f64)) -> Complex64 {
    let tk = k.two_k() as i32;
    c(2.0 * (a0 * a).sqrt(), 0.0).powi(tk) / c(a0 + a, -(b - b0)).powi(tk)
}

#[test]
fn admissibility_constants() {
    for tk in 2..6 {
        let w = MotherWavelet::fundamental(label(tk)).unwrap();
        let want = 4.0 * PI / (tk as f64 - 1.0);
        match w.admissibility() {
            Admissibility::Finite(v) => assert!((v - want).abs() < 1e-10 * want),
            Admissibility::Divergent => panic!("fundamental state must be admissible"),
        }
        assert!((w.reconstruction_constant().unwrap() - 1.0 / want).abs() < 1e-12);
        assert_eq!(w.kind(), Fiducial::Fundamental);
    }
    for s in [0.75, 1.0, 2.0, 3.0] {
        let w = MotherWavelet::morse(s).unwrap();
        let want = 4.0 * PI / (2.0 * s - 1.0);
        match w.admissibility() {
            Admissibility::Finite(v) => assert!((v - want).abs() < 1e-10 * want, "s={s}"),
            Admissibility::Divergent => panic!("s={s}"),
        }
    }
    assert!(matches!(
        MotherWavelet::basis(label(2), 3).unwrap().admissibility(),
        Admissibility::Finite(_)
    ));
}

#[test]
fn weak_origin_power_is_divergent() {
    let scheme = QuadratureScheme::default();
    let k = label(2);
    let f = HalfLineFunction::from_fn(k, ShapeHints::decaying(0.4, 2.0 * PI, 0.0), |y| {
        c(y.powf(0.4) * (-2.0 * PI * y).exp(), 0.0)
    });
    assert_eq!(
        check_admissibility(&f, &scheme).unwrap(),
        Admissibility::Divergent
    );
    let w = MotherWavelet::new(f, Fiducial::Custom, &scheme).unwrap();
    assert_eq!(w.reconstruction_constant(), Err(Error::NotAdmissible));
    assert!(matches!(
        MotherWavelet::morse(0.5),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn family_is_affine_transport() {
    let w = MotherWavelet::fundamental(label(3)).unwrap();
    let m0 = AffineElement::new(0.6, -1.4).unwrap();
    let f = wavelet_family(&w, &m0);
    let g = affine_cs_halfline(label(3), &m0);
    for &y in &[0.02, 0.3, 1.1, 3.0] {
        assert!((f.eval(y) - g.eval(y)).norm() < 1e-12 * g.eval(y).norm().max(1e-3));
    }
}

#[test]
fn grid_construction() {
    assert!(matches!(
        GridSpec::new(1.0, 2.0, 1, -1.0, 1.0, 4),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        GridSpec::new(0.0, 2.0, 4, -1.0, 1.0, 4),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        GridSpec::new(1.0, 2.0, 4, 1.0, -1.0, 4),
        Err(Error::InvalidParameter(_))
    ));
    let g = GridSpec::new(0.5, 8.0, 5, -2.0, 2.0, 9).unwrap();
    assert!((g.a(0) - 0.5).abs() < 1e-15 && (g.a_max() - 8.0).abs() < 1e-13);
    assert!((g.b(4)).abs() < 1e-15 && (g.b_max() - 2.0).abs() < 1e-15);
    assert_eq!(g.cells(), 45);
    assert!((g.alias_limit() - 2.0).abs() < 1e-15);
    // Trapezoid weights: corners get a quarter, edges a half.
    let full = g.d_ln_a * g.d_b;
    assert!((g.cell_weight(0, 0) - 0.25 * full / 0.5).abs() < 1e-15);
    assert!((g.cell_weight(2, 0) - 0.5 * full / g.a(2)).abs() < 1e-15);
    assert!((g.cell_weight(2, 3) - full / g.a(2)).abs() < 1e-15);
    assert!(g.is_boundary(0, 3) && g.is_boundary(2, 8) && !g.is_boundary(2, 3));
}

#[test]
fn default_grid_shape() {
    let g = GridSpec::default_grid();
    assert_eq!((g.n_a, g.n_b), (75, 257));
    assert!((g.a(0).ln() + 10.0).abs() < 1e-12);
    assert!((g.a_max().ln() - 4.5).abs() < 1e-12);
    assert!((g.alias_limit() - 4.0).abs() < 1e-12);
}

#[test]
fn refine_and_coarsen() {
    let g = GridSpec::default_grid();
    let r = g.refine(2);
    assert_eq!(r.n_a % 2, 1);
    assert!((r.d_ln_a - g.d_ln_a / 2.0).abs() < 1e-15);
    assert!((r.d_b - g.d_b / 2.0).abs() < 1e-15);
    assert!(r.a(0) <= g.a(0) / 2.0 * (1.0 + 1e-12));
    assert!(r.a_max() >= g.a_max() * 2.0 * (1.0 - 1e-12));
    assert!((r.b0 - 2.0 * g.b0).abs() < 1e-12 && (r.b_max() - 2.0 * g.b_max()).abs() < 1e-12);
    let cg = g.coarsen().unwrap();
    assert_eq!((cg.n_a, cg.n_b), (38, 129));
    assert!((cg.a_max() - g.a_max()).abs() < 1e-9 * g.a_max());
    assert!(GridSpec::new(1.0, 2.0, 4, -1.0, 1.0, 5)
        .unwrap()
        .coarsen()
        .is_none());
}

#[test]
fn coefficients_of_a_coherent_state() {
    let k = label(2);
    let w = MotherWavelet::fundamental(k).unwrap();
    let zeta = c(0.3, -0.45);
    let (m0, _) = zeta_to_affine(zeta).unwrap();
    let (a0, b0) = (m0.a(), m0.b());
    let spec = GridSpec::new(
        a0 * (-0.6f64).exp(),
        a0 * 0.6f64.exp(),
        7,
        b0 - 0.9,
        b0 + 0.9,
        7,
    )
    .unwrap();
    let psi = coherent_halfline(k, zeta).unwrap();
    let grid = analyze(&psi, &w, &spec, &QuadratureScheme::default()).unwrap();
    assert_eq!(grid.failed_cells(), 0);
    let mut best = (0, 0, 0.0);
    for i in 0..spec.n_a {
        for j in 0..spec.n_b {
            let v = grid.get(i, j).norm();
            let want = fundamental_overlap(k, (a0, b0), (spec.a(i), spec.b(j))).norm();
            assert!((v - want).abs() < 1e-9, "cell ({i},{j})");
            if v > best.2 {
                best = (i, j, v);
            }
        }
    }
    assert_eq!((best.0, best.1), (3, 3));
    assert!((best.2 - 1.0).abs() < 1e-9);
}

#[test]
fn coefficients_match_overlap_kernel() {
    let k = label(3);
    let w = MotherWavelet::fundamental(k).unwrap();
    let psi = affine_cs_halfline(k, &AffineElement::new(1.3, 0.4).unwrap());
    let spec = GridSpec::new(0.05, 20.0, 9, -6.0, 6.0, 25).unwrap();
    let grid = analyze(&psi, &w, &spec, &QuadratureScheme::default()).unwrap();
    for i in 0..spec.n_a {
        for j in 0..spec.n_b {
            let want = fundamental_overlap(k, (1.3, 0.4), (spec.a(i), spec.b(j)));
            assert!(
                (grid.get(i, j) - want).norm() < 1e-9,
                "cell ({i},{j}): {} vs {want}",
                grid.get(i, j)
            );
        }
    }
}

#[test]
fn analysis_is_conjugate_linear() {
    let k = label(2);
    let w = MotherWavelet::fundamental(k).unwrap();
    let f = basis_halfline(k, 1).unwrap();
    let g = morse_family(2.0, &AffineElement::new(0.8, 0.5).unwrap()).unwrap();
    let (alpha, beta) = (c(0.7, -1.2), c(-0.3, 0.4));
    let h = linear_combination(k, &[(alpha, f.clone()), (beta, g.clone())]);
    let spec = GridSpec::new(0.1, 10.0, 6, -4.0, 4.0, 17).unwrap();
    let scheme = QuadratureScheme::default();
    let (cf, cg, ch) = (
        analyze(&f, &w, &spec, &scheme).unwrap(),
        analyze(&g, &w, &spec, &scheme).unwrap(),
        analyze(&h, &w, &spec, &scheme).unwrap(),
    );
    for idx in 0..spec.cells() {
        let want = alpha.conj() * cf.values[idx] + beta.conj() * cg.values[idx];
        assert!((ch.values[idx] - want).norm() < 1e-9);
    }
}

#[test]
fn analysis_is_covariant() {
    // C_{U(M₀)ψ}(a, b) = C_ψ(a/a₀, (b − b₀)/a₀)
    let k = label(2);
    let w = MotherWavelet::morse(1.5).unwrap();
    let psi = basis_halfline(k, 2).unwrap();
    let (a0, b0) = (1.7, -0.6);
    let moved = affine_action(k, &AffineElement::new(a0, b0).unwrap(), &psi);
    let spec = GridSpec::new(0.1, 5.0, 6, -3.0, 3.0, 13).unwrap();
    let pulled =
        GridSpec::new(0.1 / a0, 5.0 / a0, 6, (-3.0 - b0) / a0, (3.0 - b0) / a0, 13).unwrap();
    let scheme = QuadratureScheme::default();
    let lhs = analyze(&moved, &w, &spec, &scheme).unwrap();
    let rhs = analyze(&psi, &w, &pulled, &scheme).unwrap();
    for idx in 0..spec.cells() {
        assert!(
            (lhs.values[idx] - rhs.values[idx]).norm() < 1e-9,
            "cell {idx}"
        );
    }
}

#[test]
fn single_cell_grid() {
    let k = label(2);
    let w = MotherWavelet::fundamental(k).unwrap();
    let spec = GridSpec::single_cell(1.0, 0.0, 0.1, 0.2);
    assert_eq!(spec.cells(), 1);
    assert!((spec.cell_weight(0, 0) - 0.02).abs() < 1e-15);
    let grid = analyze(w.sigma0(), &w, &spec, &QuadratureScheme::default()).unwrap();
    assert!((grid.get(0, 0) - 1.0).norm() < 1e-10);
    assert!((grid.energy() - 0.02).abs() < 1e-11);
    assert_eq!(grid.boundary_fraction(), 1.0);
}

#[test]
fn zero_grid_reconstructs_zero() {
    let k = label(2);
    let w = MotherWavelet::fundamental(k).unwrap();
    let grid = CoefficientGrid::zeros(k, GridSpec::new(0.1, 10.0, 5, -2.0, 2.0, 9).unwrap());
    let s = synthesize(&grid, &w, false).unwrap();
    for &y in &[0.01, 0.5, 1.5] {
        assert_eq!(s.function.eval(y), c(0.0, 0.0));
    }
    assert_eq!(s.coverage, 0.0);
    assert!(!s.coverage_warning);
}

#[test]
fn synthesis_checks_label() {
    let w = MotherWavelet::fundamental(label(3)).unwrap();
    let grid = CoefficientGrid::zeros(label(2), GridSpec::new(0.1, 10.0, 5, -2.0, 2.0, 9).unwrap());
    assert!(matches!(
        synthesize(&grid, &w, false),
        Err(Error::InvalidLabel(_))
    ));
}

#[test]
fn coarse_grid_raises_coverage_warning() {
    let k = label(2);
    let w = MotherWavelet::fundamental(k).unwrap();
    let spec = GridSpec::new(0.5, 2.0, 5, -1.0, 1.0, 5).unwrap();
    let grid = analyze(w.sigma0(), &w, &spec, &QuadratureScheme::default()).unwrap();
    let s = synthesize(&grid, &w, false).unwrap();
    assert!(s.coverage > COVERAGE_LIMIT);
    assert!(s.coverage_warning);
}

#[test]
fn resolution_of_identity_on_default_grid() {
    let k = label(2);
    let w = MotherWavelet::fundamental(k).unwrap();
    let states: Vec<_> = (0..3).map(|m| basis_halfline(k, m).unwrap()).collect();
    let spec = GridSpec::default_grid();
    let r = identity_resolution_check(&w, &states, &spec, &QuadratureScheme::default()).unwrap();
    assert!(r.max_deviation < 2e-2, "{}", r.max_deviation);
    assert!(r.route_agreement.unwrap() < 1e-10);
    assert!(r.zeta_deviation.unwrap() < 2e-2);
    let est = r.grid_error_estimate.unwrap();
    assert!(est > 0.0 && est < 2e-2);
    for (i, row) in r.exact.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((v - if i == j { 1.0 } else { 0.0 }).norm() < 1e-9);
        }
    }
}

#[test]
fn fitted_constant_close_to_exact() {
    let w = MotherWavelet::fundamental(label(2)).unwrap();
    let fitted =
        fitted_constant(&w, &GridSpec::default_grid(), &QuadratureScheme::default()).unwrap();
    let exact = w.reconstruction_constant().unwrap();
    assert!(
        ((fitted - exact) / exact).abs() < 1e-2,
        "{fitted} vs {exact}"
    );
}

#[test]
fn morse_reconstruction_with_fitted_constant() {
    let scheme = QuadratureScheme::default();
    let w = MotherWavelet::morse(2.0).unwrap();
    let spec = GridSpec::default_grid();
    let psi = morse_fundamental(3.0).unwrap().function().clone();
    let grid = analyze(&psi, &w, &spec, &scheme).unwrap();
    let s = synthesize(&grid, &w, false).unwrap();
    let fitted = fitted_constant(&w, &spec, &scheme).unwrap();
    let rescaled = s.function.scaled(c(fitted / s.constant, 0.0));
    let err =
        relative_l2_distance(&rescaled, &psi, 3.5, &QuadratureScheme::with_tol(1e-8)).unwrap();
    assert!(err < 1e-2, "{err}");
}

proptest! {
    #[test]
    fn measure_routes_agree(ln_a in -6.0f64..4.0, b in -20.0f64..20.0, tk in 2u32..6) {
        let k = label(tk);
        let a = ln_a.exp();
        let d1 = measure_density_ab(k, a);
        let d2 = measure_density_via_zeta(k, a, b);
        prop_assert!((d1 - d2).abs() < 1e-10 * d1);
    }
}
