//! Means, variances, correlations and the generalized uncertainty relations,
//! all computed in coefficient space.

use num_complex::Complex64;

use crate::algebra::{
    apply_generator, coherent_coeffs_fine, BandMatrix, CoeffState, Generator, RepLabel,
    DEFAULT_TOL_STATE,
};
use crate::error::{Error, Result};
use crate::group::{affine_to_zeta, zeta_to_affine, AffineElement};

pub const SINGULAR_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyReport {
    pub pair: (Generator, Generator),
    pub mean1: f64,
    pub mean2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta12: f64,
    /// `⟨i[O₁,O₂]⟩` from the banded commutator.
    pub commutator_mean: f64,
    /// The same mean from `−2 Im⟨O₁s|O₂s⟩`.
    pub commutator_shortcut: f64,
    /// `4Δ₁Δ₂ − Δ₁₂² − ⟨i[O₁,O₂]⟩²`, nonnegative on physical states.
    pub residual_inc1: f64,
    /// `4Δ₁Δ₂ − ⟨i[O₁,O₂]⟩²`.
    pub residual_inc2: f64,
    /// Least-squares `λ` for `(Ō₁ + iλŌ₂)|s⟩ = 0`.
    pub lambda: Complex64,
    pub saturation_residual: f64,
}

struct Centered {
    t: CoeffState,
    u1: CoeffState,
    u2: CoeffState,
    c1: CoeffState,
    c2: CoeffState,
    m1: Complex64,
    m2: Complex64,
}

fn centered(pair: (Generator, Generator), s: &CoeffState) -> Result<Centered> {
    for op in [pair.0, pair.1] {
        if !op.is_self_adjoint() {
            return Err(Error::UnknownGenerator(format!("{op} is not self-adjoint")));
        }
    }
    if !s.is_normalized(DEFAULT_TOL_STATE) {
        return Err(Error::NotNormalized(s.norm()));
    }
    let t = s.padded(2);
    let u1 = apply_generator(pair.0, &t);
    let u2 = apply_generator(pair.1, &t);
    let m1 = t.inner(&u1);
    let m2 = t.inner(&u2);
    let c1 = u1.add_scaled(-m1, &t);
    let c2 = u2.add_scaled(-m2, &t);
    Ok(Centered {
        t,
        u1,
        u2,
        c1,
        c2,
        m1,
        m2,
    })
}

pub fn report(pair: (Generator, Generator), s: &CoeffState) -> Result<UncertaintyReport> {
    let c = centered(pair, s)?;
    let delta1 = c.c1.norm_sqr();
    let delta2 = c.c2.norm_sqr();
    let delta12 = 2.0 * c.c1.inner(&c.c2).re;
    let dim = c.t.coeffs().len();
    let k = s.k();
    let comm =
        BandMatrix::generator(pair.0, k, dim).commutator(&BandMatrix::generator(pair.1, k, dim));
    let ct = comm.apply(c.t.coeffs());
    let commutator_mean = (Complex64::i()
        * c.t
            .coeffs()
            .iter()
            .zip(&ct)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>())
    .re;
    let commutator_shortcut = -2.0 * c.u1.inner(&c.u2).im;
    let mu = if delta2 > 0.0 {
        -c.c2.inner(&c.c1) / delta2
    } else {
        Complex64::default()
    };
    let lambda = -Complex64::i() * mu;
    let saturation_residual = c.c1.add_scaled(mu, &c.c2).norm();
    Ok(UncertaintyReport {
        pair,
        mean1: c.m1.re,
        mean2: c.m2.re,
        delta1,
        delta2,
        delta12,
        commutator_mean,
        commutator_shortcut,
        residual_inc1: 4.0 * delta1 * delta2
            - delta12 * delta12
            - commutator_mean * commutator_mean,
        residual_inc2: 4.0 * delta1 * delta2 - commutator_mean * commutator_mean,
        lambda,
        saturation_residual,
    })
}

/// One annihilation-type equation; `residual` is `None` when the
/// coefficient is singular and the equation was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationCheck {
    pub name: &'static str,
    pub residual: Option<f64>,
    pub note: Option<String>,
}

fn centered_combination(s: &CoeffState, terms: &[(Complex64, Generator)]) -> Result<f64> {
    let t = s.padded(1);
    let mut acc = CoeffState::new(s.k(), vec![Complex64::default(); t.coeffs().len()]);
    for &(c, op) in terms {
        let u = apply_generator(op, &t);
        let m = t.inner(&u);
        acc = acc.add_scaled(c, &u.add_scaled(-m, &t));
    }
    Ok(acc.norm())
}

/// Residuals of the centered first-order equations satisfied by `|ζ⟩` and
/// of `(B̄ + i(a−ib)Ā)|ab⟩ = 0`.
pub fn saturation_residuals(zeta: Complex64, k: RepLabel) -> Result<Vec<SaturationCheck>> {
    let s = coherent_coeffs_fine(k, zeta)?;
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let z2 = zeta * zeta;
    let mut out = Vec::new();
    let mut push = |name: &'static str,
                    singular: Option<Complex64>,
                    terms: &dyn Fn() -> Vec<(Complex64, Generator)>|
     -> Result<()> {
        if let Some(d) = singular {
            if d.norm() < SINGULAR_GUARD {
                out.push(SaturationCheck {
                    name,
                    residual: None,
                    note: Some(format!(
                        "{}",
                        Error::SingularCoefficient(format!("denominator {d} near zero"))
                    )),
                });
                return Ok(());
            }
        }
        out.push(SaturationCheck {
            name,
            residual: Some(centered_combination(&s, &terms())?),
            note: None,
        });
        Ok(())
    };
    push("J1 + i(z^2+1)/(z^2-1) J2", Some(z2 - one), &|| {
        vec![
            (one, Generator::J1),
            (i * (z2 + one) / (z2 - one), Generator::J2),
        ]
    })?;
    push("J0 - 2z/(z^2+1) J1", Some(z2 + one), &|| {
        vec![
            (one, Generator::J0),
            (-2.0 * zeta / (z2 + one), Generator::J1),
        ]
    })?;
    push("J0 + 2iz/(z^2-1) J2", Some(z2 - one), &|| {
        vec![
            (one, Generator::J0),
            (2.0 * i * zeta / (z2 - one), Generator::J2),
        ]
    })?;
    let (m0, _) = zeta_to_affine(zeta)?;
    let lam = Complex64::new(m0.a(), -m0.b());
    push("B + i(a-ib) A", None, &|| {
        vec![(one, Generator::B), (i * lam, Generator::A)]
    })?;
    Ok(out)
}

/// Coefficients `(p, q)` of the operators `p O₁ + q O₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncorrelatedPair {
    pub base: (Generator, Generator),
    pub first: (f64, f64),
    pub second: (f64, f64),
    pub correlation: f64,
}

/// Correlation of `p₁O₁+q₁O₂` and `p₂O₁+q₂O₂` on `s`.
pub fn transformed_correlation(
    pair: (Generator, Generator),
    first: (f64, f64),
    second: (f64, f64),
    s: &CoeffState,
) -> Result<f64> {
    let c = centered(pair, s)?;
    let v1 =
        c.c1.scaled(first.0.into())
            .add_scaled(first.1.into(), &c.c2);
    let v2 =
        c.c1.scaled(second.0.into())
            .add_scaled(second.1.into(), &c.c2);
    Ok(2.0 * v1.inner(&v2).re)
}

/// `O₁` and `O₂ + μO₁` with `μ = −Δ₁₂/(2Δ₁)` on the coherent state `|ζ⟩`.
pub fn uncorrelated_pair_zeta(
    zeta: Complex64,
    k: RepLabel,
    pair: (Generator, Generator),
) -> Result<UncorrelatedPair> {
    let s = coherent_coeffs_fine(k, zeta)?;
    let r = report(pair, &s)?;
    let mu = if r.delta1 > 0.0 {
        -r.delta12 / (2.0 * r.delta1)
    } else {
        0.0
    };
    let first = (1.0, 0.0);
    let second = (mu, 1.0);
    let correlation = transformed_correlation(pair, first, second, &s)?;
    Ok(UncorrelatedPair {
        base: pair,
        first,
        second,
        correlation,
    })
}

/// `A` and `a^{−1}(B + bA)` on `|ab⟩`.
pub fn uncorrelated_pair_affine(m0: &AffineElement, k: RepLabel) -> Result<UncorrelatedPair> {
    let s = coherent_coeffs_fine(k, affine_to_zeta(m0))?;
    let pair = (Generator::A, Generator::B);
    let first = (1.0, 0.0);
    let second = (m0.b() / m0.a(), 1.0 / m0.a());
    let correlation = transformed_correlation(pair, first, second, &s)?;
    Ok(UncorrelatedPair {
        base: pair,
        first,
        second,
        correlation,
    })
}
