//! SU(1,1), SL(2,R) and the affine and rotation subgroups.
//!
//! Elements are immutable values. Constructors check the defining invariant
//! against a tolerance; inputs that miss it by at most ten times the tolerance
//! are rescaled onto the group, anything further off is rejected.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_TOL_GROUP: f64 = 1e-12;

const FOUR_PI: f64 = 4.0 * PI;
const TWO_PI: f64 = 2.0 * PI;

fn reduce(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// `[[γ1, γ2], [γ̄2, γ̄1]]` with `|γ1|² − |γ2|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Element {
    gamma1: Complex64,
    gamma2: Complex64,
}

impl Su11Element {
    pub fn new(gamma1: Complex64, gamma2: Complex64) -> Result<Self> {
        Self::new_with_tol(gamma1, gamma2, DEFAULT_TOL_GROUP)
    }

    pub fn new_with_tol(gamma1: Complex64, gamma2: Complex64, tol: f64) -> Result<Self> {
        let det = gamma1.norm_sqr() - gamma2.norm_sqr();
        let dev = (det - 1.0).abs();
        if !dev.is_finite() || dev > 10.0 * tol {
            return Err(Error::InvalidGroupElement(format!("|γ1|² − |γ2|² = {det}")));
        }
        if dev > tol {
            let s = det.sqrt().recip();
            return Ok(Self {
                gamma1: gamma1 * s,
                gamma2: gamma2 * s,
            });
        }
        Ok(Self { gamma1, gamma2 })
    }

    pub fn identity() -> Self {
        Self {
            gamma1: Complex64::new(1.0, 0.0),
            gamma2: Complex64::new(0.0, 0.0),
        }
    }

    pub fn gamma1(&self) -> Complex64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> Complex64 {
        self.gamma2
    }

    pub fn inverse(&self) -> Self {
        Self {
            gamma1: self.gamma1.conj(),
            gamma2: -self.gamma2,
        }
    }

    /// Entries of the full 2×2 matrix, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [self.gamma1, self.gamma2],
            [self.gamma2.conj(), self.gamma1.conj()],
        ]
    }

    /// Largest entrywise distance between the two matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.gamma1 - other.gamma1)
            .norm()
            .max((self.gamma2 - other.gamma2).norm())
    }
}

/// Real 2×2 matrix of unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2rElement {
    pub(crate) g: [[f64; 2]; 2],
}

impl Sl2rElement {
    pub fn new(g11: f64, g12: f64, g21: f64, g22: f64) -> Result<Self> {
        Self::new_with_tol(g11, g12, g21, g22, DEFAULT_TOL_GROUP)
    }

    pub fn new_with_tol(g11: f64, g12: f64, g21: f64, g22: f64, tol: f64) -> Result<Self> {
        let det = g11 * g22 - g12 * g21;
        let dev = (det - 1.0).abs();
        if !dev.is_finite() || dev > 10.0 * tol {
            return Err(Error::InvalidGroupElement(format!("det = {det}")));
        }
        let s = if dev > tol { det.sqrt().recip() } else { 1.0 };
        Ok(Self {
            g: [[g11 * s, g12 * s], [g21 * s, g22 * s]],
        })
    }

    pub fn identity() -> Self {
        Self {
            g: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.g
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self.g, o.g);
        let mut g = [[0.0; 2]; 2];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { g }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.g[i][j] - other.g[i][j]).abs());
            }
        }
        d
    }
}

/// The affine map `x ↦ a x + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineElement {
    a: f64,
    b: f64,
}

impl AffineElement {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidGroupElement(format!(
                "affine scale a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `(a, b)·(a', b') = (a a', b + a b')`, the composition of the affine maps.
    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a,
            b: self.b + self.a * o.b,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: 1.0 / self.a,
            b: -self.b / self.a,
        }
    }

    pub fn to_sl2r(&self) -> Sl2rElement {
        let r = self.a.sqrt();
        Sl2rElement {
            g: [[r, self.b / r], [0.0, 1.0 / r]],
        }
    }
}

/// `Γ_θ = diag(e^{−iθ/2}, e^{iθ/2})`, θ kept in `[0, 4π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationElement {
    theta: f64,
}

impl RotationElement {
    pub fn new(theta: f64) -> Self {
        Self {
            theta: reduce(theta, FOUR_PI),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_su11(&self) -> Su11Element {
        Su11Element {
            gamma1: Complex64::from_polar(1.0, -0.5 * self.theta),
            gamma2: Complex64::new(0.0, 0.0),
        }
    }

    /// The rotation `[[cos φ, sin φ], [−sin φ, cos φ]]` with `φ = −θ/2`.
    pub fn to_sl2r(&self) -> Sl2rElement {
        let (s, c) = (-0.5 * self.theta).sin_cos();
        Sl2rElement {
            g: [[c, s], [-s, c]],
        }
    }
}

/// Displacement parameters; `ξ = (τ/2) e^{−iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParams {
    tau: f64,
    phi: f64,
}

impl DisplacementParams {
    pub fn new(tau: f64, phi: f64) -> Self {
        Self {
            tau,
            phi: reduce(phi, TWO_PI),
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(0.5 * self.tau, -self.phi)
    }
}

pub fn sl2r_to_su11(g: &Sl2rElement) -> Su11Element {
    let [[g11, g12], [g21, g22]] = g.g;
    Su11Element {
        gamma1: Complex64::new(0.5 * (g11 + g22), 0.5 * (g12 - g21)),
        gamma2: Complex64::new(0.5 * (g12 + g21), -0.5 * (g22 - g11)),
    }
}

pub fn su11_to_sl2r(x: &Su11Element) -> Sl2rElement {
    let (p, q) = (x.gamma1, x.gamma2);
    Sl2rElement {
        g: [[p.re + q.im, p.im + q.re], [q.re - p.im, p.re - q.im]],
    }
}

pub fn affine_to_su11(m: &AffineElement) -> Su11Element {
    let (a, b) = (m.a, m.b);
    let d = 0.5 / a.sqrt();
    Su11Element {
        gamma1: Complex64::new((a + 1.0) * d, b * d),
        gamma2: Complex64::new(b * d, (a - 1.0) * d),
    }
}

pub fn compose(x: &Su11Element, y: &Su11Element) -> Su11Element {
    let g1 = x.gamma1 * y.gamma1 + x.gamma2 * y.gamma2.conj();
    let g2 = x.gamma1 * y.gamma2 + x.gamma2 * y.gamma1.conj();
    let det = g1.norm_sqr() - g2.norm_sqr();
    let s = det.sqrt().recip();
    Su11Element {
        gamma1: g1 * s,
        gamma2: g2 * s,
    }
}

/// Splits `g = H·R` with `H` upper triangular of positive diagonal and `R` a rotation.
pub fn decompose_affine_rotation(g: &Sl2rElement) -> Result<(AffineElement, RotationElement)> {
    let [[g11, g12], [g21, g22]] = g.g;
    let r2 = g21 * g21 + g22 * g22;
    if !(r2 > f64::MIN_POSITIVE) || !r2.is_finite() {
        return Err(Error::DegenerateDecomposition);
    }
    let h11 = r2.sqrt().recip();
    let phi = (-g21).atan2(g22);
    let (s, c) = phi.sin_cos();
    let h12 = -g11 * s + g12 * c;
    let affine = AffineElement::new(h11 * h11, h11 * h12)?;
    Ok((affine, RotationElement::new(-2.0 * phi)))
}

pub fn displacement_matrix(p: &DisplacementParams) -> Su11Element {
    let h = 0.5 * p.tau;
    Su11Element {
        gamma1: Complex64::new(h.cosh(), 0.0),
        gamma2: Complex64::new(0.0, -1.0) * Complex64::from_polar(h.sinh(), -p.phi),
    }
}

pub fn zeta_from_displacement(p: &DisplacementParams) -> Complex64 {
    Complex64::from_polar((0.5 * p.tau).tanh(), -p.phi)
}

/// Displacement parameters with `ζ = tanh(τ/2) e^{−iφ}`, `τ ≥ 0`.
pub fn displacement_from_zeta(zeta: Complex64) -> Result<DisplacementParams> {
    check_disk(zeta)?;
    Ok(DisplacementParams::new(
        2.0 * zeta.norm().atanh(),
        -zeta.arg(),
    ))
}

pub(crate) fn check_disk(zeta: Complex64) -> Result<()> {
    if !(zeta.norm_sqr() < 1.0) {
        return Err(Error::InvalidLabel(format!(
            "|ζ| = {} is not below 1",
            zeta.norm()
        )));
    }
    Ok(())
}

/// `ζ = (1−a+ib)/(1+a−ib)`, `e^{−iθ} = (1+a+ib)/(1+a−ib)`.
pub fn zeta_to_affine(zeta: Complex64) -> Result<(AffineElement, RotationElement)> {
    check_disk(zeta)?;
    let one = Complex64::new(1.0, 0.0);
    let u = (one - zeta) / (one + zeta);
    let m = AffineElement::new(u.re, -u.im)
        .map_err(|_| Error::InvalidLabel(format!("ζ = {zeta} too close to the boundary")))?;
    let theta = 2.0 * (one + u).arg();
    Ok((m, RotationElement::new(theta)))
}

pub fn affine_to_zeta(m: &AffineElement) -> Complex64 {
    let u = Complex64::new(m.a, -m.b);
    let one = Complex64::new(1.0, 0.0);
    (one - u) / (one + u)
}
