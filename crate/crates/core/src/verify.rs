//! Self-check suites over the whole crate, each reduced to named residuals
//! compared with a tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{
    coherent_coeffs, coherent_coeffs_fine, coherent_order, combination_residual, expectation,
    BandMatrix, Generator, RepLabel, RESIDUAL_TAIL_TOL,
};
use crate::error::{Error, Result};
use crate::group::{affine_to_zeta, AffineElement};
use crate::morse::{j0_eigen_residual, morse_family, morse_fundamental};
use crate::quadrature::{
    self, gauss_laguerre, gram_halfline, inner_product_halfline, QuadratureScheme, Shape,
};
use crate::realizations::{
    affine_cs_halfline, basis_disk, basis_halfline, basis_halfplane, cayley_pullback,
    coherent_expansion_halfline, coherent_generating_halfline, coherent_halfline,
    laplace_intertwiner, ShapeHints,
};
use crate::special::ln_gamma;
use crate::uncertainty::{report, saturation_residuals};
use crate::wavelet::{
    check_admissibility, identity_resolution_check, Admissibility, GridSpec, MotherWavelet,
};

pub const SUITES: [&str; 11] = [
    "algebra",
    "orthonormality",
    "realizations",
    "coherent",
    "phase",
    "means",
    "saturation",
    "admissibility",
    "morse",
    "quadrature",
    "completeness",
];

/// Per-cell tolerance floor for the grid analysis in the completeness suite.
pub const COMPLETENESS_MIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `residual ≤ tol`.
    pub fn below(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tol,
            pass: residual <= tol,
        }
    }

    /// Passes when `residual > tol`.
    pub fn above(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tol,
            pass: residual > tol,
        }
    }

    fn from_result(name: impl Into<String>, r: Result<f64>, tol: f64) -> Self {
        let name = name.into();
        match r {
            Ok(v) => Self::below(name, v, tol),
            Err(e) => Self::failure(name, &e),
        }
    }

    fn failure(name: String, e: &Error) -> Self {
        let residual = match e {
            Error::QuadratureFailure { achieved, .. } => *achieved,
            _ => f64::NAN,
        };
        Self {
            name: format!("{name}: {e}"),
            residual,
            tol: 0.0,
            pass: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub quad_tol: f64,
    pub tail_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quad_tol: quadrature::DEFAULT_QUAD_TOL,
            tail_tol: crate::algebra::DEFAULT_TAIL_TOL,
        }
    }
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let checks = match name {
        "algebra" => algebra_suite(),
        "orthonormality" => orthonormality_suite(opts),
        "realizations" => realizations_suite(opts),
        "coherent" => coherent_suite(opts),
        "phase" => phase_suite(),
        "means" => means_suite(),
        "saturation" => saturation_suite(),
        "admissibility" => admissibility_suite(opts),
        "morse" => morse_suite(opts),
        "quadrature" => quadrature_suite(opts),
        "completeness" => completeness_suite(opts),
        other => return Err(Error::InvalidParameter(format!("unknown suite {other:?}"))),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        checks,
    })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|s| run_suite(s, opts).expect("listed suite"))
        .collect()
}

fn label(two_k: u32) -> RepLabel {
    RepLabel::new(two_k).expect("2k ≥ 2")
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 25 points of the disk on a 5 × 5 polar grid.
pub fn zeta_samples() -> Vec<Complex64> {
    let mut v = Vec::new();
    for r in [0.0, 0.3, 0.55, 0.75, 0.9] {
        for j in 0..5 {
            v.push(Complex64::from_polar(r, 2.0 * PI * j as f64 / 5.0 + 0.3));
        }
    }
    v
}

fn algebra_suite() -> Vec<Check> {
    let i = c(0.0, 1.0);
    let (dim, limit) = (44, 40);
    let mut out = Vec::new();
    for tk in 2..=5 {
        let k = label(tk);
        let g = |op| BandMatrix::generator(op, k, dim);
        let (j0, j1, j2) = (g(Generator::J0), g(Generator::J1), g(Generator::J2));
        let (jp, jm) = (g(Generator::Jplus), g(Generator::Jminus));
        let (a, b) = (g(Generator::A), g(Generator::B));
        let rels = [
            ("[J1,J2] = -iJ0", j1.commutator(&j2).add_scaled(i, &j0)),
            ("[J2,J0] = iJ1", j2.commutator(&j0).add_scaled(-i, &j1)),
            ("[J0,J1] = iJ2", j0.commutator(&j1).add_scaled(-i, &j2)),
            (
                "[J0,J+] = J+",
                j0.commutator(&jp).add_scaled(-c(1.0, 0.0), &jp),
            ),
            (
                "[J0,J-] = -J-",
                j0.commutator(&jm).add_scaled(c(1.0, 0.0), &jm),
            ),
            (
                "[J+,J-] = -2J0",
                jp.commutator(&jm).add_scaled(c(2.0, 0.0), &j0),
            ),
            ("[B,A] = iA", b.commutator(&a).add_scaled(-i, &a)),
        ];
        for (name, m) in rels {
            out.push(Check::below(
                format!("2k={tk} {name}"),
                m.max_abs_within(limit),
                1e-12,
            ));
        }
        let cas = j1
            .mul(&j1)
            .add_scaled(c(1.0, 0.0), &j2.mul(&j2))
            .add_scaled(-c(1.0, 0.0), &j0.mul(&j0))
            .add_scaled(-c(k.casimir(), 0.0), &BandMatrix::identity(dim));
        out.push(Check::below(
            format!("2k={tk} Casimir = k(1-k)"),
            cas.max_abs_within(limit),
            1e-12,
        ));
    }
    out
}

fn orthonormality_suite(opts: &VerifyOptions) -> Vec<Check> {
    let scheme = QuadratureScheme::with_tol(opts.quad_tol);
    [2, 3, 4]
        .into_iter()
        .map(|tk| {
            let k = label(tk);
            let name = format!("2k={tk} <km|kn> = delta, m,n <= 15");
            let r = (0..=15)
                .map(|m| basis_halfline(k, m))
                .collect::<Result<Vec<_>>>()
                .and_then(|fs| gram_halfline(&fs, &scheme))
                .map(|g| {
                    let mut e: f64 = 0.0;
                    for (m, row) in g.iter().enumerate() {
                        for (n, v) in row.iter().enumerate() {
                            e = e.max((v - if m == n { 1.0 } else { 0.0 }).norm());
                        }
                    }
                    e
                });
            Check::from_result(name, r, 1e-8)
        })
        .collect()
}

/// Fixed sample points of the right half-plane.
pub fn halfplane_samples() -> Vec<Complex64> {
    (0..20)
        .map(|j| {
            let t = j as f64;
            c(0.15 + 0.12 * t, 2.0 * (0.7 * t).sin())
        })
        .collect()
}

fn realizations_suite(opts: &VerifyOptions) -> Vec<Check> {
    let scheme = QuadratureScheme::with_tol(opts.quad_tol);
    let mut out = Vec::new();
    let zs: Vec<Complex64> = zeta_samples().into_iter().map(|z| z * 0.95).collect();
    for tk in [2, 3, 4] {
        let k = label(tk);
        let r = (0..=8i64).try_fold(0.0f64, |acc, m| {
            let f = basis_halfline(k, m)?;
            let h = basis_halfplane(k, m)?;
            let mut e = acc;
            for w in halfplane_samples() {
                let v = laplace_intertwiner(k, &f, w, &scheme)?;
                e = e.max((v - h.eval(w)).norm() / h.eval(w).norm().max(1.0));
            }
            Ok(e)
        });
        out.push(Check::from_result(
            format!("2k={tk} Laplace intertwiner, m <= 8"),
            r,
            1e-7,
        ));
        let mut e: f64 = 0.0;
        for m in 0..=8 {
            let d = basis_disk(k, m).expect("m ≥ 0");
            let p = cayley_pullback(k, &basis_halfplane(k, m).expect("m ≥ 0"));
            for &z in &zs {
                e = e.max((p.eval(z) - d.eval(z)).norm() / d.eval(z).norm().max(1.0));
            }
        }
        out.push(Check::below(
            format!("2k={tk} Cayley pullback, m <= 8"),
            e,
            1e-10,
        ));
    }
    out
}

fn coherent_suite(opts: &VerifyOptions) -> Vec<Check> {
    let scheme = QuadratureScheme::with_tol(opts.quad_tol);
    let ys = [0.01, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.5];
    let mut out = Vec::new();
    for tk in [2, 3] {
        let k = label(tk);
        let (mut series, mut genf, mut norm_coeff): (f64, f64, f64) = (0.0, 0.0, 0.0);
        let mut norm_quad = Ok(0.0f64);
        for z in zeta_samples() {
            let f = coherent_halfline(k, z).expect("inside the disk");
            let s = coherent_coeffs(k, z, None).expect("inside the disk");
            norm_coeff = norm_coeff.max((s.norm() - 1.0).abs());
            for &y in &ys {
                let v = f.eval(y);
                let scale = v.norm().max(1.0);
                if let Ok(e) =
                    coherent_expansion_halfline(k, z, coherent_order(k, z, RESIDUAL_TAIL_TOL), y)
                {
                    series = series.max((e - v).norm() / scale);
                }
                if let Ok(g) = coherent_generating_halfline(k, z, y) {
                    genf = genf.max((g - v).norm() / scale);
                }
            }
            norm_quad = norm_quad.and_then(|acc| Ok(acc.max((f.norm(&scheme)? - 1.0).abs())));
        }
        out.push(Check::below(
            format!("2k={tk} coefficient series vs closed form"),
            series,
            1e-9,
        ));
        out.push(Check::below(
            format!("2k={tk} generating function vs closed form"),
            genf,
            1e-9,
        ));
        out.push(Check::below(
            format!("2k={tk} coefficient norm"),
            norm_coeff,
            1e-9,
        ));
        out.push(Check::from_result(
            format!("2k={tk} quadrature norm"),
            norm_quad,
            1e-9,
        ));
    }
    out
}

/// `(a, b)` sample labels.
pub fn affine_samples() -> Vec<(f64, f64)> {
    (0..20)
        .map(|j| {
            let t = j as f64;
            ((0.35 * t - 3.0).exp() * 1.5, 3.0 * (1.3 * t).sin())
        })
        .collect()
}

fn phase_suite() -> Vec<Check> {
    let mut out = Vec::new();
    for tk in [2, 3, 5] {
        let k = label(tk);
        let mut e: f64 = 0.0;
        for (a, b) in affine_samples() {
            let m0 = AffineElement::new(a, b).expect("a > 0");
            let zeta = affine_to_zeta(&m0);
            let f = affine_cs_halfline(k, &m0);
            let g = coherent_halfline(k, zeta).expect("inside the disk");
            let w = (c(1.0, 0.0) + zeta) / (c(1.0, 0.0) + zeta.conj());
            let ph = w.powf(k.k());
            for j in 1..40 {
                let y = 0.05 * j as f64 / a;
                let v = f.eval(y);
                e = e.max((v - ph * g.eval(y)).norm() / v.norm().max(1.0));
            }
        }
        out.push(Check::below(
            format!("2k={tk} <y|ab> = ((1+z)/(1+z*))^k <y|z>"),
            e,
            1e-12,
        ));
    }
    out
}

fn means_suite() -> Vec<Check> {
    let mut out = Vec::new();
    for tk in [2, 3] {
        let k = label(tk);
        let kk = k.k();
        let (mut ej, mut ea, mut en): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for z in zeta_samples() {
            let s = coherent_coeffs(k, z, None).expect("inside the disk");
            let d = 1.0 - z.norm_sqr();
            let want = [
                kk * (1.0 + z.norm_sqr()) / d,
                kk * 2.0 * z.re / d,
                (c(0.0, kk) * (z - z.conj()) / d).re,
            ];
            let got: Vec<f64> = [Generator::J0, Generator::J1, Generator::J2]
                .iter()
                .map(|&op| expectation(op, &s).expect("normalized").re)
                .collect();
            for (g, w) in got.iter().zip(want) {
                ej = ej.max((g - w).abs() / w.abs().max(kk));
            }
            let n = [(1.0 + z.norm_sqr()) / d, 2.0 * z.re / d, -2.0 * z.im / d];
            let lorentz = n[0] * n[0] - n[1] * n[1] - n[2] * n[2];
            en = en.max((lorentz - 1.0).abs());
            for (g, w) in got.iter().zip(n) {
                en = en.max((g - kk * w).abs() / (kk * w).abs().max(kk));
            }
            let (m0, _) = crate::group::zeta_to_affine(z).expect("inside the disk");
            let a_mean = expectation(Generator::A, &s).expect("normalized").re;
            let b_mean = expectation(Generator::B, &s).expect("normalized").re;
            let (wa, wb) = (kk / m0.a(), -kk * m0.b() / m0.a());
            ea = ea.max((a_mean - wa).abs() / wa.abs().max(kk));
            ea = ea.max((b_mean - wb).abs() / wb.abs().max(kk));
        }
        out.push(Check::below(
            format!("2k={tk} <J0,J1,J2> closed forms"),
            ej,
            1e-10,
        ));
        out.push(Check::below(
            format!("2k={tk} <A>, <B> closed forms"),
            ea,
            1e-10,
        ));
        out.push(Check::below(format!("2k={tk} <J> = k n"), en, 1e-10));
    }
    out
}

fn saturation_suite() -> Vec<Check> {
    let mut out = Vec::new();
    for tk in [2, 3] {
        let k = label(tk);
        let kk = k.k();
        let (mut sat, mut pro, mut inc1): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for z in zeta_samples() {
            for chk in saturation_residuals(z, k).expect("inside the disk") {
                if let Some(r) = chk.residual {
                    sat = sat.max(r);
                }
            }
            let s = coherent_coeffs_fine(k, z).expect("inside the disk");
            let one = Some(Generator::J0);
            pro = pro.max(combination_residual(
                &s,
                &[
                    (c(1.0, 0.0), one),
                    (-z, Some(Generator::Jplus)),
                    (c(-kk, 0.0), None),
                ],
            ));
            pro = pro.max(combination_residual(
                &s,
                &[
                    (z, one),
                    (c(-1.0, 0.0), Some(Generator::Jminus)),
                    (kk * z, None),
                ],
            ));
            let (m0, _) = crate::group::zeta_to_affine(z).expect("inside the disk");
            pro = pro.max(combination_residual(
                &s,
                &[
                    (c(m0.a(), -m0.b()), Some(Generator::A)),
                    (c(0.0, -1.0), Some(Generator::B)),
                    (c(-kk, 0.0), None),
                ],
            ));
            for pair in [
                (Generator::J1, Generator::J2),
                (Generator::J0, Generator::J1),
                (Generator::J0, Generator::J2),
                (Generator::A, Generator::B),
            ] {
                let r = report(pair, &s).expect("normalized");
                inc1 = inc1.max(r.residual_inc1.abs());
            }
        }
        out.push(Check::below(
            format!("2k={tk} centered annihilation equations"),
            sat,
            1e-9,
        ));
        out.push(Check::below(
            format!("2k={tk} eigen-equations of |z> and |ab>"),
            pro,
            1e-9,
        ));
        out.push(Check::below(
            format!("2k={tk} equality in the generalized relation"),
            inc1,
            1e-9,
        ));
        let mut inc2: f64 = 0.0;
        for x in [-0.8, -0.3, 0.0, 0.4, 0.85] {
            let s = coherent_coeffs_fine(k, c(x, 0.0)).expect("inside the disk");
            let r = report((Generator::J1, Generator::J2), &s).expect("normalized");
            inc2 = inc2.max(r.residual_inc2.abs()).max(r.delta12.abs());
        }
        out.push(Check::below(
            format!("2k={tk} real z saturates the usual relation for (J1,J2)"),
            inc2,
            1e-9,
        ));
        let s1 = crate::algebra::basis_state(k, 1, 8).expect("m < n");
        let r = report((Generator::J1, Generator::J2), &s1).expect("normalized");
        out.push(Check::above(
            format!("2k={tk} strict inequality on |k1>"),
            r.residual_inc2,
            0.1 * kk,
        ));
    }
    out
}

fn admissibility_suite(opts: &VerifyOptions) -> Vec<Check> {
    let scheme = QuadratureScheme::with_tol(opts.quad_tol);
    let mut out = Vec::new();
    for tk in [2, 3, 4] {
        let k = label(tk);
        let want = 4.0 * PI / (tk as f64 - 1.0);
        let r = basis_halfline(k, 0).and_then(|f| match check_admissibility(&f, &scheme)? {
            Admissibility::Finite(v) => Ok((v - want).abs() / want),
            Admissibility::Divergent => Ok(f64::INFINITY),
        });
        out.push(Check::from_result(
            format!("2k={tk} K for |k0> = 4pi/(2k-1)"),
            r,
            1e-10,
        ));
    }
    out.push(Check::below(
        "Morse s = 1/2 rejected",
        if morse_fundamental(0.5).is_err() {
            0.0
        } else {
            1.0
        },
        0.0,
    ));
    let hints = ShapeHints::decaying(0.4, 2.0 * PI, 0.0);
    let f = crate::realizations::HalfLineFunction::from_fn(label(2), hints, |y| {
        (y.powf(0.4) * (-2.0 * PI * y).exp()).into()
    });
    let r = check_admissibility(&f, &scheme).map(|a| {
        if a == Admissibility::Divergent {
            0.0
        } else {
            1.0
        }
    });
    out.push(Check::from_result(
        "origin power 0.4 at k=1 is divergent",
        r,
        0.0,
    ));
    for s in [0.6, 1.5, 3.0] {
        let r = morse_fundamental(s).and_then(|m| {
            let want = 4.0 * PI * (ln_gamma(2.0 * s - 1.0) - ln_gamma(2.0 * s)).exp();
            match check_admissibility(m.function(), &scheme)? {
                Admissibility::Finite(v) => Ok((v - want).abs() / want),
                Admissibility::Divergent => Ok(f64::INFINITY),
            }
        });
        out.push(Check::from_result(
            format!("Morse s={s} finite K = 4pi/(2s-1)"),
            r,
            1e-9,
        ));
    }
    out
}

fn morse_suite(opts: &VerifyOptions) -> Vec<Check> {
    let scheme = QuadratureScheme::with_tol(opts.quad_tol);
    let k = crate::morse::label();
    let mut out = Vec::new();
    let r = (|| {
        let mut e: f64 = 0.0;
        for (a, b) in affine_samples().into_iter().step_by(2) {
            let m0 = AffineElement::new(a, b)?;
            let f = morse_family(1.0, &m0)?;
            let g = coherent_halfline(k, affine_to_zeta(&m0))?;
            e = e.max((inner_product_halfline(&f, &g, &scheme)?.value.norm() - 1.0).abs());
        }
        Ok(e)
    })();
    out.push(Check::from_result(
        "s=1 family equals Perelomov rays",
        r,
        1e-10,
    ));
    for s in [1.5, 2.5] {
        let r = morse_fundamental(s).and_then(|m| Ok((m.function().norm(&scheme)? - 1.0).abs()));
        out.push(Check::from_result(format!("s={s} unit norm"), r, 1e-10));
    }
    out.push(Check::from_result(
        "s=1 is a J0 eigenstate",
        j0_eigen_residual(1.0, &scheme),
        1e-8,
    ));
    match j0_eigen_residual(2.0, &scheme) {
        Ok(v) => out.push(Check::above("s=2 is not a J0 eigenstate", v, 0.1)),
        Err(e) => out.push(Check::failure("s=2 is not a J0 eigenstate".into(), &e)),
    }
    out
}

fn quadrature_suite(opts: &VerifyOptions) -> Vec<Check> {
    let scheme = QuadratureScheme::with_tol(opts.quad_tol);
    let mut out = Vec::new();
    for alpha in [0.0, 1.0, 2.5] {
        let rule = gauss_laguerre(64, alpha);
        let sum: f64 = rule.log_weights.iter().map(|w| w.exp()).sum();
        let want = ln_gamma(alpha + 1.0).exp();
        out.push(Check::below(
            format!("Gauss-Laguerre(64, {alpha}) weight sum"),
            (sum - want).abs() / want,
            1e-12,
        ));
    }
    let cases: [(f64, f64, f64); 3] = [(2.5, 1.0, 0.0), (0.5, 3.0, 0.0), (1.0, 2.0, 0.7)];
    for (p, r, nu) in cases {
        let shape = Shape {
            alpha: p,
            rate: Some(r),
            degree: 0.0,
            freq: nu,
            spread: 0.0,
            support: None,
        };
        let q = quadrature::integrate(
            &shape,
            |y| y.powf(p) * (Complex64::new(-r, 2.0 * PI * nu) * y).exp(),
            &scheme,
        );
        let want = (ln_gamma(p + 1.0) - (p + 1.0) * c(r, -2.0 * PI * nu).ln()).exp();
        let name = format!("int y^{p} exp(-({r}-2pi i {nu})y)");
        out.push(Check::from_result(
            name,
            q.map(|q| (q.value - want).norm() / want.norm()),
            opts.quad_tol.max(1e-14) * 10.0,
        ));
    }
    out
}

fn completeness_suite(opts: &VerifyOptions) -> Vec<Check> {
    let name = "identity on {|10>,|11>,|12>}, default grid";
    if opts.quad_tol < COMPLETENESS_MIN_TOL {
        let e = Error::QuadratureFailure {
            achieved: COMPLETENESS_MIN_TOL,
            requested: opts.quad_tol,
        };
        return vec![Check::failure(name.into(), &e)];
    }
    let scheme = QuadratureScheme::with_tol(opts.quad_tol);
    let k = label(2);
    let r = (|| {
        let w = MotherWavelet::fundamental(k)?;
        let states = (0..3)
            .map(|m| basis_halfline(k, m))
            .collect::<Result<Vec<_>>>()?;
        identity_resolution_check(&w, &states, &GridSpec::default_grid(), &scheme)
    })();
    match r {
        Ok(rep) => vec![
            Check::below(name, rep.max_deviation, 2e-2),
            Check::below(
                "frame and disk routes agree",
                rep.route_agreement.unwrap_or(f64::INFINITY),
                1e-10,
            ),
        ],
        Err(e) => vec![Check::failure(name.into(), &e)],
    }
}
