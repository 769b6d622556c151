//! The canonical basis and coherent states in the three function spaces:
//! analytic functions on the unit disk, holomorphic functions on the right
//! half-plane, and `L²(ℝ⁺, y^{1−2k} dy)`.
//!
//! Half-line functions carry shape hints (power at the origin, exponential
//! decay rate, polynomial degree, oscillation frequency) that the quadrature
//! uses to pick and scale its rules. Closed-form states also carry analytic
//! first and second derivatives so that generator actions are exact.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{Generator, RepLabel};
use crate::error::{Error, Result};
use crate::group::{self, AffineElement, Sl2rElement, Su11Element};
use crate::quadrature::{self, QuadValue, QuadratureScheme, Shape};
use crate::special::{ln_gamma, log_mk_factorial, log_norm_k, normalized_laguerre_jet};

type ValueFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
type JetFn = Arc<dyn Fn(f64) -> [Complex64; 3] + Send + Sync>;
type PointFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Shape of a half-line function as seen by the quadrature.
///
/// `origin_power` and `decay_rate` are lower bounds, `poly_degree` an upper
/// bound. The oscillation is `e^{2πiνy}` with `ν` in
/// `[frequency − spread, frequency + spread]`. `decay_rate = None` means the
/// function vanishes outside `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeHints {
    pub origin_power: f64,
    pub decay_rate: Option<f64>,
    pub poly_degree: f64,
    pub frequency: f64,
    pub spread: f64,
    pub support: Option<(f64, f64)>,
}

impl ShapeHints {
    pub fn decaying(origin_power: f64, decay_rate: f64, poly_degree: f64) -> Self {
        Self {
            origin_power,
            decay_rate: Some(decay_rate),
            poly_degree,
            frequency: 0.0,
            spread: 0.0,
            support: None,
        }
    }

    pub fn compact(lo: f64, hi: f64) -> Self {
        Self {
            origin_power: 0.0,
            decay_rate: None,
            poly_degree: 0.0,
            frequency: 0.0,
            spread: 0.0,
            support: Some((lo, hi)),
        }
    }

    /// Hints of `e^{2πiby} ψ(ay)`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self {
            origin_power: self.origin_power,
            decay_rate: self.decay_rate.map(|c| c * a),
            poly_degree: self.poly_degree,
            frequency: self.frequency * a + b,
            spread: self.spread * a,
            support: self.support.map(|(lo, hi)| (lo / a, hi / a)),
        }
    }
}

#[derive(Clone)]
enum Eval {
    Value(ValueFn),
    Jet(JetFn),
}

/// A function on `y > 0` in the representation space of label `k`.
#[derive(Clone)]
pub struct HalfLineFunction {
    k: RepLabel,
    hints: ShapeHints,
    eval: Eval,
}

impl fmt::Debug for HalfLineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HalfLineFunction")
            .field("k", &self.k)
            .field("hints", &self.hints)
            .field("has_jet", &self.has_jet())
            .finish()
    }
}

impl HalfLineFunction {
    pub fn from_fn(
        k: RepLabel,
        hints: ShapeHints,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            k,
            hints,
            eval: Eval::Value(Arc::new(f)),
        }
    }

    /// `f` returns the value and the first two derivatives.
    pub fn from_jet(
        k: RepLabel,
        hints: ShapeHints,
        f: impl Fn(f64) -> [Complex64; 3] + Send + Sync + 'static,
    ) -> Self {
        Self {
            k,
            hints,
            eval: Eval::Jet(Arc::new(f)),
        }
    }

    pub fn k(&self) -> RepLabel {
        self.k
    }

    pub fn hints(&self) -> &ShapeHints {
        &self.hints
    }

    pub fn with_hints(mut self, hints: ShapeHints) -> Self {
        self.hints = hints;
        self
    }

    pub fn has_jet(&self) -> bool {
        matches!(self.eval, Eval::Jet(_))
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        match &self.eval {
            Eval::Value(f) => f(y),
            Eval::Jet(f) => f(y)[0],
        }
    }

    pub fn jet(&self, y: f64) -> Result<[Complex64; 3]> {
        match &self.eval {
            Eval::Value(_) => Err(Error::MissingDerivative),
            Eval::Jet(f) => Ok(f(y)),
        }
    }

    pub fn norm(&self, scheme: &QuadratureScheme) -> Result<f64> {
        Ok(quadrature::inner_product_halfline(self, self, scheme)?
            .value
            .re
            .max(0.0)
            .sqrt())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        linear_combination(self.k, &[(c, self.clone())])
    }
}

/// `Σ cᵢ ψᵢ`; keeps derivative handles when every term has them.
pub fn linear_combination(
    k: RepLabel,
    terms: &[(Complex64, HalfLineFunction)],
) -> HalfLineFunction {
    let hints = combine_hints(terms.iter().map(|(_, f)| &f.hints));
    let terms: Vec<(Complex64, HalfLineFunction)> = terms.to_vec();
    if terms.iter().all(|(_, f)| f.has_jet()) {
        HalfLineFunction::from_jet(k, hints, move |y| {
            let mut acc = [Complex64::default(); 3];
            for (c, f) in &terms {
                let j = f.jet(y).expect("jet checked at construction");
                for (a, v) in acc.iter_mut().zip(j) {
                    *a += c * v;
                }
            }
            acc
        })
    } else {
        HalfLineFunction::from_fn(k, hints, move |y| {
            terms.iter().map(|(c, f)| c * f.eval(y)).sum()
        })
    }
}

fn combine_hints<'a>(hints: impl Iterator<Item = &'a ShapeHints>) -> ShapeHints {
    let hints: Vec<&ShapeHints> = hints.collect();
    if hints.is_empty() {
        return ShapeHints::compact(0.0, 0.0);
    }
    let origin_power = hints
        .iter()
        .map(|h| h.origin_power)
        .fold(f64::INFINITY, f64::min);
    let poly_degree = hints.iter().map(|h| h.poly_degree).fold(0.0, f64::max);
    let lo = hints
        .iter()
        .map(|h| h.frequency - h.spread)
        .fold(f64::INFINITY, f64::min);
    let hi = hints
        .iter()
        .map(|h| h.frequency + h.spread)
        .fold(f64::NEG_INFINITY, f64::max);
    let rates: Vec<f64> = hints.iter().filter_map(|h| h.decay_rate).collect();
    let (decay_rate, support) = if rates.is_empty() {
        let s_lo = hints
            .iter()
            .filter_map(|h| h.support)
            .map(|s| s.0)
            .fold(f64::INFINITY, f64::min);
        let s_hi = hints
            .iter()
            .filter_map(|h| h.support)
            .map(|s| s.1)
            .fold(0.0, f64::max);
        (None, Some((s_lo, s_hi)))
    } else {
        (Some(rates.into_iter().fold(f64::INFINITY, f64::min)), None)
    };
    ShapeHints {
        origin_power,
        decay_rate,
        poly_degree,
        frequency: 0.5 * (lo + hi),
        spread: 0.5 * (hi - lo),
        support,
    }
}

/// A function on the unit disk.
#[derive(Clone)]
pub struct DiskFunction {
    k: RepLabel,
    f: PointFn,
}

impl DiskFunction {
    pub fn new(k: RepLabel, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { k, f: Arc::new(f) }
    }

    pub fn k(&self) -> RepLabel {
        self.k
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        debug_assert!(z.norm_sqr() < 1.0, "disk function evaluated at |z| ≥ 1");
        (self.f)(z)
    }
}

/// A function on the half-plane `Re w > 0`.
#[derive(Clone)]
pub struct HalfPlaneFunction {
    k: RepLabel,
    f: PointFn,
}

impl HalfPlaneFunction {
    pub fn new(k: RepLabel, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { k, f: Arc::new(f) }
    }

    pub fn k(&self) -> RepLabel {
        self.k
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        debug_assert!(w.re > 0.0, "half-plane function evaluated at Re w ≤ 0");
        (self.f)(w)
    }
}

fn check_m(m: i64) -> Result<usize> {
    usize::try_from(m).map_err(|_| Error::InvalidLabel(format!("basis index m = {m}")))
}

/// `⟨y|km⟩ = (4π)^k / √(Γ(2k) [m]_k!) y^{2k−1} e^{−2πy} P_m(y)`.
pub fn basis_halfline(k: RepLabel, m: i64) -> Result<HalfLineFunction> {
    let m = check_m(m)?;
    let p = k.two_k() as f64 - 1.0;
    let ln_pref = k.k() * (4.0 * PI).ln();
    let hints = ShapeHints::decaying(p, 2.0 * PI, m as f64);
    Ok(HalfLineFunction::from_jet(k, hints, move |y| {
        let x = 4.0 * PI * y;
        let [q, xq1, x2q2] = normalized_laguerre_jet(k, m, x)[m];
        let e = (ln_pref + p * y.ln() - 2.0 * PI * y).exp();
        let u = p - 2.0 * PI * y;
        let v0 = e * q;
        let v1 = e * (u * q + xq1) / y;
        let v2 = e * ((u * u - p) * q + 2.0 * u * xq1 + x2q2) / (y * y);
        [v0.into(), v1.into(), v2.into()]
    }))
}

/// All basis functions `m = 0..=n` at one point, without derivatives.
pub fn basis_values(k: RepLabel, n: usize, y: f64) -> Vec<f64> {
    let p = k.two_k() as f64 - 1.0;
    let e = (k.k() * (4.0 * PI).ln() + p * y.ln() - 2.0 * PI * y).exp();
    crate::special::normalized_laguerre(k, n, 4.0 * PI * y)
        .into_iter()
        .map(|q| e * q)
        .collect()
}

/// `√((2k−1)/π) · √([m]_k!) / m!`.
fn disk_coefficient(k: RepLabel, m: usize) -> f64 {
    let c = (k.two_k() as f64 - 1.0) / PI;
    (0.5 * c.ln() + 0.5 * log_mk_factorial(m, k) - ln_gamma(m as f64 + 1.0)).exp()
}

pub fn basis_disk(k: RepLabel, m: i64) -> Result<DiskFunction> {
    let m = check_m(m)?;
    let c = disk_coefficient(k, m);
    Ok(DiskFunction::new(k, move |z| c * (I * z).powi(m as i32)))
}

pub fn basis_halfplane(k: RepLabel, m: i64) -> Result<HalfPlaneFunction> {
    let m = check_m(m)?;
    let tk = k.two_k() as i32;
    let c = disk_coefficient(k, m) * 2f64.powi(tk - 1);
    Ok(HalfPlaneFunction::new(k, move |w| {
        c * (ONE - w).powi(m as i32) / (w + ONE).powi(tk + m as i32)
    }))
}

/// `C e^{−sy} y^{2k−1}` with `ln |C|`, `arg C` given; decay `Re s > 0`.
fn exponential_state(k: RepLabel, ln_c: f64, phase: Complex64, s: Complex64) -> HalfLineFunction {
    let p = k.two_k() as f64 - 1.0;
    let hints = ShapeHints {
        origin_power: p,
        decay_rate: Some(s.re),
        poly_degree: 0.0,
        frequency: -s.im / (2.0 * PI),
        spread: 0.0,
        support: None,
    };
    HalfLineFunction::from_jet(k, hints, move |y| {
        let f = phase * (ln_c + p * y.ln() - s * y).exp();
        let g = p / y - s;
        [f, f * g, f * (g * g - p / (y * y))]
    })
}

/// Perelomov state `⟨y|ζ⟩`.
pub fn coherent_halfline(k: RepLabel, zeta: Complex64) -> Result<HalfLineFunction> {
    group::check_disk(zeta)?;
    let tk = k.two_k() as i32;
    let w = ONE + zeta;
    let ln_c = log_norm_k(k) + k.k() * (1.0 - zeta.norm_sqr()).ln() - tk as f64 * w.norm().ln();
    let phase = Complex64::from_polar(1.0, -(tk as f64) * w.arg());
    let s = 2.0 * PI * (ONE - zeta) / w;
    Ok(exponential_state(k, ln_c, phase, s))
}

/// Affine coherent state `⟨y|ab⟩ = U^k(M(a,b)) ⟨y|k0⟩`.
pub fn affine_cs_halfline(k: RepLabel, m0: &AffineElement) -> HalfLineFunction {
    let (a, b) = (m0.a(), m0.b());
    let ln_c = log_norm_k(k) + k.k() * a.ln();
    exponential_state(k, ln_c, ONE, Complex64::new(2.0 * PI * a, -2.0 * PI * b))
}

pub fn coherent_disk(k: RepLabel, zeta: Complex64) -> Result<DiskFunction> {
    group::check_disk(zeta)?;
    let tk = k.two_k() as i32;
    let c = ((k.two_k() as f64 - 1.0) / PI).sqrt() * (1.0 - zeta.norm_sqr()).powf(k.k());
    Ok(DiskFunction::new(k, move |z| {
        let d = ONE - I * zeta * z;
        debug_assert!(d.re > 0.0);
        c / d.powi(tk)
    }))
}

pub fn coherent_halfplane(k: RepLabel, zeta: Complex64) -> Result<HalfPlaneFunction> {
    group::check_disk(zeta)?;
    let tk = k.two_k() as i32;
    let c = ((k.two_k() as f64 - 1.0) / PI).sqrt()
        * 2f64.powi(tk - 1)
        * (1.0 - zeta.norm_sqr()).powf(k.k());
    Ok(HalfPlaneFunction::new(k, move |w| {
        let d = w + ONE - zeta * (ONE - w);
        debug_assert!(d.re > 0.0);
        c / d.powi(tk)
    }))
}

/// `a^{1−k} e^{2πiby} ψ(ay)`.
pub fn affine_action(k: RepLabel, m0: &AffineElement, psi: &HalfLineFunction) -> HalfLineFunction {
    let (a, b) = (m0.a(), m0.b());
    let hints = psi.hints.affine(a, b);
    let scale = a.powf(1.0 - k.k());
    let psi = psi.clone();
    if psi.has_jet() {
        HalfLineFunction::from_jet(k, hints, move |y| {
            let [f0, f1, f2] = psi.jet(a * y).expect("jet checked at construction");
            let e = Complex64::from_polar(scale, 2.0 * PI * b * y);
            let w = Complex64::new(0.0, 2.0 * PI * b);
            [
                e * f0,
                e * (w * f0 + a * f1),
                e * (w * w * f0 + 2.0 * a * w * f1 + a * a * f2),
            ]
        })
    } else {
        HalfLineFunction::from_fn(k, hints, move |y| {
            Complex64::from_polar(scale, 2.0 * PI * b * y) * psi.eval(a * y)
        })
    }
}

/// `f(z) = 2 (iz+1)^{−2k} h((1−iz)/(1+iz))`.
pub fn cayley_pullback(k: RepLabel, h: &HalfPlaneFunction) -> DiskFunction {
    let tk = k.two_k() as i32;
    let h = h.clone();
    DiskFunction::new(k, move |z| {
        let d = ONE + I * z;
        2.0 * h.eval((ONE - I * z) / d) / d.powi(tk)
    })
}

/// `√((4π)^{2k−1}/Γ(2k−1)) ∫ ψ(y) e^{−2πwy} dy`.
pub fn laplace_intertwiner(
    k: RepLabel,
    psi: &HalfLineFunction,
    w: Complex64,
    scheme: &QuadratureScheme,
) -> Result<Complex64> {
    if !(w.re > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Laplace variable w = {w} needs Re w > 0"
        )));
    }
    let tk = k.two_k() as f64;
    let c = (0.5 * ((tk - 1.0) * (4.0 * PI).ln() - ln_gamma(tk - 1.0))).exp();
    let h = &psi.hints;
    let shape = Shape {
        alpha: h.origin_power,
        rate: h.decay_rate.map(|r| r + 2.0 * PI * w.re),
        degree: h.poly_degree,
        freq: h.frequency - w.im,
        spread: h.spread,
        support: h.support,
    };
    let q: QuadValue =
        quadrature::integrate(&shape, |y| psi.eval(y) * (-2.0 * PI * w * y).exp(), scheme)?;
    Ok(c * q.value)
}

/// Action of a generator as a differential operator on `L²_k(ℝ⁺)`.
pub fn generator_action_halfline(
    op: Generator,
    k: RepLabel,
    psi: &HalfLineFunction,
) -> Result<HalfLineFunction> {
    let kk = k.k();
    if op == Generator::A {
        let psi = psi.clone();
        let mut hints = psi.hints.clone();
        hints.poly_degree += 1.0;
        return Ok(HalfLineFunction::from_fn(k, hints, move |y| {
            2.0 * PI * y * psi.eval(y)
        }));
    }
    if !psi.has_jet() {
        return Err(Error::MissingDerivative);
    }
    let mut hints = psi.hints.clone();
    // −yψ'' + 2(k−1)ψ' annihilates y^p for p ∈ {0, 2k−1}; otherwise the
    // power at the origin drops by one.
    let p = hints.origin_power;
    let keeps = matches!(op, Generator::J2 | Generator::B) || p == 0.0 || p == 2.0 * kk - 1.0;
    if !keeps {
        hints.origin_power -= 1.0;
    }
    hints.poly_degree += 2.0;
    let f = psi.clone();
    let c = 1.0 / (4.0 * PI);
    let q = 4.0 * PI * PI;
    let g: Box<dyn Fn(f64, [Complex64; 3]) -> Complex64 + Send + Sync> = match op {
        Generator::J0 => {
            Box::new(move |y, [v, d1, d2]| c * (-y * d2 + 2.0 * (kk - 1.0) * d1 + q * y * v))
        }
        Generator::J1 => {
            Box::new(move |y, [v, d1, d2]| -c * (-y * d2 + 2.0 * (kk - 1.0) * d1 - q * y * v))
        }
        Generator::J2 | Generator::B => {
            Box::new(move |y, [v, d1, _]| I * (y * d1 + (1.0 - kk) * v))
        }
        other => {
            return Err(Error::UnknownGenerator(format!(
                "{other} has no half-line differential form here"
            )))
        }
    };
    Ok(HalfLineFunction::from_fn(k, hints, move |y| {
        g(y, f.jet(y).expect("jet checked above"))
    }))
}

/// `𝒯^k(Γ) f(z) = (γ2 z + γ̄1)^{−2k} f((γ1 z + γ̄2)/(γ2 z + γ̄1))`.
pub fn disk_action(k: RepLabel, g: &Su11Element, f: &DiskFunction) -> DiskFunction {
    let (g1, g2) = (g.gamma1(), g.gamma2());
    let tk = k.two_k() as i32;
    let f = f.clone();
    DiskFunction::new(k, move |z| {
        let d = g2 * z + g1.conj();
        f.eval((g1 * z + g2.conj()) / d) / d.powi(tk)
    })
}

/// `T^k(g) h(w) = (i g21 w + g11)^{−2k} h((g22 w − i g12)/(i g21 w + g11))`.
pub fn halfplane_action(k: RepLabel, g: &Sl2rElement, h: &HalfPlaneFunction) -> HalfPlaneFunction {
    let [[g11, g12], [g21, g22]] = g.entries();
    let tk = k.two_k() as i32;
    let h = h.clone();
    HalfPlaneFunction::new(k, move |w| {
        let d = I * g21 * w + g11;
        h.eval((g22 * w - I * g12) / d) / d.powi(tk)
    })
}

/// `Σ_{m≤n} c_m(ζ) ⟨y|km⟩`, the coherent state through its basis expansion.
pub fn coherent_expansion_halfline(
    k: RepLabel,
    zeta: Complex64,
    n: usize,
    y: f64,
) -> Result<Complex64> {
    let c = crate::algebra::coherent_prefix(k, zeta, n)?;
    let vals = basis_values(k, n, y);
    Ok(c.iter().zip(&vals).map(|(c, v)| c * v).sum())
}

/// `√((4π)^{2k}/Γ(2k)) (1−|ζ|²)^k y^{2k−1} e^{−2πy} 𝒫(ζ, y)` with the closed-form
/// generating function `𝒫`.
pub fn coherent_generating_halfline(k: RepLabel, zeta: Complex64, y: f64) -> Result<Complex64> {
    let g = crate::special::generating_function(zeta, k, y)?;
    let p = k.two_k() as f64 - 1.0;
    let ln_c = log_norm_k(k) + k.k() * (1.0 - zeta.norm_sqr()).ln() + p * y.ln() - 2.0 * PI * y;
    Ok(ln_c.exp() * g)
}
