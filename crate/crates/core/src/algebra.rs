//! Ladder-operator algebra on truncated coefficient vectors over `|k m⟩`.
//!
//! Generators are stored as bands. A state of truncation order `N` holds
//! `c_0..=c_N`; operators keep that order, so raising operators drop the
//! `N+1` component and flag the loss.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{self, AffineElement, Su11Element};
use crate::quadrature::{self, QuadratureScheme};
use crate::realizations::{self, HalfLineFunction, ShapeHints};
use crate::special::{ln_gamma, log_mk_factorial, mk_bracket};

pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
pub const DEFAULT_N_MAX: usize = 512;
pub const DEFAULT_TOL_STATE: f64 = 1e-10;
pub const DEFAULT_PROJ_TOL: f64 = 1e-8;
/// Tail tolerance for states fed to residual checks, where the unbounded
/// generators amplify whatever the truncation leaves behind.
pub const RESIDUAL_TAIL_TOL: f64 = 1e-30;
pub const RESIDUAL_N_MAX: usize = 4096;

/// The label `k` of a discrete-series representation, stored as `2k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepLabel {
    two_k: u32,
}

impl RepLabel {
    pub fn new(two_k: u32) -> Result<Self> {
        if two_k < 2 {
            return Err(Error::InvalidLabel(format!("2k = {two_k}; need k ≥ 1")));
        }
        Ok(Self { two_k })
    }

    pub fn two_k(&self) -> u32 {
        self.two_k
    }

    pub fn k(&self) -> f64 {
        0.5 * self.two_k as f64
    }

    pub fn casimir(&self) -> f64 {
        let k = self.k();
        k * (1.0 - k)
    }
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_k.is_multiple_of(2) {
            write!(f, "{}", self.two_k / 2)
        } else {
            write!(f, "{}/2", self.two_k)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    J0,
    J1,
    J2,
    Jplus,
    Jminus,
    A,
    B,
}

impl Generator {
    pub const ALL: [Generator; 7] = [
        Self::J0,
        Self::J1,
        Self::J2,
        Self::Jplus,
        Self::Jminus,
        Self::A,
        Self::B,
    ];

    pub fn is_self_adjoint(&self) -> bool {
        !matches!(self, Self::Jplus | Self::Jminus)
    }

    fn raises(&self) -> bool {
        !matches!(self, Self::J0 | Self::Jminus)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::J0 => "J0",
            Self::J1 => "J1",
            Self::J2 => "J2",
            Self::Jplus => "Jplus",
            Self::Jminus => "Jminus",
            Self::A => "A",
            Self::B => "B",
        };
        f.write_str(s)
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "J0" => Self::J0,
            "J1" => Self::J1,
            "J2" => Self::J2,
            "Jplus" | "J+" => Self::Jplus,
            "Jminus" | "J-" => Self::Jminus,
            "A" => Self::A,
            "B" => Self::B,
            other => return Err(Error::UnknownGenerator(other.to_string())),
        })
    }
}

/// A square banded matrix of dimension `dim`. `diags[d]` is the diagonal
/// with offset `d − lower`; entry `i` of it sits at `(i, i + offset)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    dim: usize,
    lower: usize,
    diags: Vec<Vec<Complex64>>,
}

impl BandMatrix {
    pub fn zeros(dim: usize, lower: usize, upper: usize) -> Self {
        Self {
            dim,
            lower,
            diags: vec![vec![Complex64::default(); dim]; lower + upper + 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn upper(&self) -> usize {
        self.diags.len() - 1 - self.lower
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let off = j as isize - i as isize;
        if off < -(self.lower as isize)
            || off > self.upper() as isize
            || i >= self.dim
            || j >= self.dim
        {
            return Complex64::default();
        }
        self.diags[(off + self.lower as isize) as usize][i]
    }

    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let off = j as isize - i as isize;
        self.diags[(off + self.lower as isize) as usize][i] = v;
    }

    /// The generator restricted to `m = 0..dim`.
    pub fn generator(op: Generator, k: RepLabel, dim: usize) -> Self {
        let mut m = Self::zeros(dim, 1, 1);
        let kk = k.k();
        let half = Complex64::new(0.5, 0.0);
        let minus_half_i = Complex64::new(0.0, -0.5);
        for i in 0..dim {
            // (J+)_{i+1,i} = √[i+1]_k and (J−)_{i,i+1} = √[i+1]_k.
            let r = mk_bracket(i + 1, k).sqrt();
            let (diag, up, down) = match op {
                Generator::J0 => ((kk + i as f64).into(), 0.0.into(), 0.0.into()),
                Generator::Jplus => (0.0.into(), 0.0.into(), r.into()),
                Generator::Jminus => (0.0.into(), r.into(), 0.0.into()),
                Generator::J1 => (0.0.into(), half * r, half * r),
                Generator::J2 | Generator::B => (0.0.into(), -minus_half_i * r, minus_half_i * r),
                Generator::A => ((kk + i as f64).into(), half * r, half * r),
            };
            m.set(i, i, diag);
            if i + 1 < dim {
                m.set(i, i + 1, up);
                m.set(i + 1, i, down);
            }
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, 0, 0);
        for i in 0..dim {
            m.set(i, i, 1.0.into());
        }
        m
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim.min(v.len());
        let mut out = vec![Complex64::default(); v.len()];
        let up = self.upper();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let j0 = i.saturating_sub(self.lower);
            let j1 = (i + up).min(n - 1);
            for j in j0..=j1 {
                *o += self.get(i, j) * v[j];
            }
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "band dimensions differ");
        let lower = self.lower + o.lower;
        let upper = self.upper() + o.upper();
        let mut r = Self::zeros(self.dim, lower, upper);
        for i in 0..self.dim {
            let l0 = i.saturating_sub(self.lower);
            let l1 = (i + self.upper()).min(self.dim - 1);
            for l in l0..=l1 {
                let a = self.get(i, l);
                if a == Complex64::default() {
                    continue;
                }
                let j0 = l.saturating_sub(o.lower);
                let j1 = (l + o.upper()).min(self.dim - 1);
                for j in j0..=j1 {
                    let cur = r.get(i, j);
                    r.set(i, j, cur + a * o.get(l, j));
                }
            }
        }
        r
    }

    pub fn add_scaled(&self, c: Complex64, o: &Self) -> Self {
        let lower = self.lower.max(o.lower);
        let upper = self.upper().max(o.upper());
        let mut r = Self::zeros(self.dim, lower, upper);
        for i in 0..self.dim {
            for j in i.saturating_sub(lower)..=(i + upper).min(self.dim - 1) {
                r.set(i, j, self.get(i, j) + c * o.get(i, j));
            }
        }
        r
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o)
            .add_scaled(Complex64::new(-1.0, 0.0), &o.mul(self))
    }

    /// Largest entry magnitude over rows and columns below `limit`.
    pub fn max_abs_within(&self, limit: usize) -> f64 {
        let lim = limit.min(self.dim);
        let mut m: f64 = 0.0;
        for i in 0..lim {
            for j in i.saturating_sub(self.lower)..(i + self.upper() + 1).min(lim) {
                m = m.max(self.get(i, j).norm());
            }
        }
        m
    }
}

/// A state as a truncated coefficient vector over `|k m⟩`, `m = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffState {
    k: RepLabel,
    coeffs: Vec<Complex64>,
    tail: f64,
    leaked: bool,
}

impl CoeffState {
    pub fn new(k: RepLabel, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a state needs at least one coefficient");
        Self {
            k,
            coeffs,
            tail: 0.0,
            leaked: false,
        }
    }

    pub fn k(&self) -> RepLabel {
        self.k
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Certified bound on `Σ_{m>N} |c_m|²` of the exact state.
    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    /// Set when an operator pushed weight beyond the truncation order.
    pub fn leaked(&self) -> bool {
        self.leaked
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() < tol
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let mut s = self.clone();
        s.coeffs.iter_mut().for_each(|c| *c /= n);
        s
    }

    /// The same state with `extra` zero coefficients appended.
    pub fn padded(&self, extra: usize) -> Self {
        let mut s = self.clone();
        s.coeffs
            .resize(self.coeffs.len() + extra, Complex64::default());
        s
    }

    /// `⟨self|other⟩`, implicitly padding the shorter vector with zeros.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut s = self.clone();
        s.coeffs.iter_mut().for_each(|x| *x *= c);
        s
    }

    /// `self + c·other`, at the larger truncation order.
    pub fn add_scaled(&self, c: Complex64, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::default(); n];
        for (i, v) in coeffs.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or_default();
            let b = other.coeffs.get(i).copied().unwrap_or_default();
            *v = a + c * b;
        }
        Self {
            k: self.k,
            coeffs,
            tail: self.tail.max(other.tail),
            leaked: self.leaked || other.leaked,
        }
    }

    /// The state as a half-line function `Σ c_m ⟨y|km⟩`.
    pub fn to_halfline(&self) -> HalfLineFunction {
        let k = self.k;
        let n = self.order();
        let coeffs = self.coeffs.clone();
        let hints = ShapeHints::decaying(k.two_k() as f64 - 1.0, 2.0 * PI, n as f64);
        HalfLineFunction::from_fn(k, hints, move |y| {
            realizations::basis_values(k, n, y)
                .iter()
                .zip(&coeffs)
                .map(|(b, c)| c * b)
                .sum()
        })
    }
}

pub fn basis_state(k: RepLabel, m: usize, n: usize) -> Result<CoeffState> {
    if m > n {
        return Err(Error::IndexOutOfRange { m, n });
    }
    let mut coeffs = vec![Complex64::default(); n + 1];
    coeffs[m] = 1.0.into();
    Ok(CoeffState::new(k, coeffs))
}

pub fn apply_generator(op: Generator, s: &CoeffState) -> CoeffState {
    apply_generator_with(op, s, DEFAULT_TAIL_TOL)
}

pub fn apply_generator_with(op: Generator, s: &CoeffState, tail_tol: f64) -> CoeffState {
    let m = BandMatrix::generator(op, s.k, s.coeffs.len());
    let leaked = s.leaked || (op.raises() && s.coeffs[s.order()].norm() > tail_tol);
    CoeffState {
        k: s.k,
        coeffs: m.apply(&s.coeffs),
        tail: s.tail,
        leaked,
    }
}

/// Applies a generator after padding by one, so the result is exact.
pub fn apply_generator_exact(op: Generator, s: &CoeffState) -> CoeffState {
    apply_generator(op, &s.padded(1))
}

/// `c_m` for `m = 0..=n` without a tail check.
pub fn coherent_prefix(k: RepLabel, zeta: Complex64, n: usize) -> Result<Vec<Complex64>> {
    group::check_disk(zeta)?;
    let r = zeta.norm();
    let ln_a = k.k() * (1.0 - r * r).ln();
    let th = zeta.arg();
    Ok((0..=n)
        .map(|m| {
            if m > 0 && r == 0.0 {
                return Complex64::default();
            }
            let ln_r = if m == 0 { 0.0 } else { m as f64 * r.ln() };
            let mag = (ln_a + 0.5 * log_mk_factorial(m, k) - ln_gamma(m as f64 + 1.0) + ln_r).exp();
            Complex64::from_polar(mag, m as f64 * th)
        })
        .collect())
}

/// Bound on `Σ_{m>n} |c_m(ζ)|²` from the decreasing ratio
/// `|c_{m+1}/c_m|² = |ζ|²(2k+m)/(m+1)`.
pub fn coherent_tail_bound(k: RepLabel, zeta: Complex64, n: usize) -> f64 {
    let x = zeta.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let m1 = n + 1;
    let ratio = x * (k.two_k() as f64 + m1 as f64) / (m1 as f64 + 1.0);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let ln_c = 2.0
        * (k.k() * (1.0 - x).ln() + 0.5 * log_mk_factorial(m1, k) - ln_gamma(m1 as f64 + 1.0))
        + m1 as f64 * x.ln();
    ln_c.exp() / (1.0 - ratio)
}

/// Truncation order needed for the tail bound to drop below `tail_tol`.
pub fn coherent_order(k: RepLabel, zeta: Complex64, tail_tol: f64) -> usize {
    let mut n = 0;
    while coherent_tail_bound(k, zeta, n) >= tail_tol {
        n += 1;
        if n > 1_000_000 {
            break;
        }
    }
    n
}

pub fn coherent_coeffs(k: RepLabel, zeta: Complex64, n: Option<usize>) -> Result<CoeffState> {
    coherent_coeffs_with(k, zeta, n, DEFAULT_TAIL_TOL, DEFAULT_N_MAX)
}

/// Perelomov coefficients `c_m = (1−|ζ|²)^k √([m]_k!) ζ^m / m!`. Without an
/// explicit order the smallest one meeting `tail_tol` is used.
pub fn coherent_coeffs_with(
    k: RepLabel,
    zeta: Complex64,
    n: Option<usize>,
    tail_tol: f64,
    n_max: usize,
) -> Result<CoeffState> {
    group::check_disk(zeta)?;
    let needed = coherent_order(k, zeta, tail_tol);
    let n = match n {
        Some(n) if n >= needed => n,
        Some(n) => {
            return Err(Error::TruncationError {
                needed,
                limit: n,
                tail: coherent_tail_bound(k, zeta, n),
            })
        }
        None if needed <= n_max => needed,
        None => {
            return Err(Error::TruncationError {
                needed,
                limit: n_max,
                tail: coherent_tail_bound(k, zeta, n_max),
            })
        }
    };
    let coeffs = coherent_prefix(k, zeta, n)?;
    Ok(CoeffState {
        k,
        coeffs,
        tail: coherent_tail_bound(k, zeta, n),
        leaked: false,
    })
}

/// Coherent coefficients truncated at [`RESIDUAL_TAIL_TOL`].
pub fn coherent_coeffs_fine(k: RepLabel, zeta: Complex64) -> Result<CoeffState> {
    coherent_coeffs_with(k, zeta, None, RESIDUAL_TAIL_TOL, RESIDUAL_N_MAX)
}

/// Rotation by `Γ_θ`: returns `(e^{−ikθ}, ζ e^{−iθ})`.
pub fn rotate_coherent(theta: f64, zeta: Complex64, k: RepLabel) -> (Complex64, Complex64) {
    (
        Complex64::from_polar(1.0, -k.k() * theta),
        zeta * Complex64::from_polar(1.0, -theta),
    )
}

/// Multiplies `c_m` by `e^{−iθ(k+m)}`.
pub fn apply_rotation(theta: f64, s: &CoeffState) -> CoeffState {
    let mut r = s.clone();
    let kk = s.k.k();
    for (m, c) in r.coeffs.iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, -theta * (kk + m as f64));
    }
    r
}

pub fn expectation(op: Generator, s: &CoeffState) -> Result<Complex64> {
    if !s.is_normalized(DEFAULT_TOL_STATE) {
        return Err(Error::NotNormalized(s.norm()));
    }
    let t = s.padded(1);
    Ok(t.inner(&apply_generator(op, &t)))
}

/// `U^k(G) s` through `G = M(a,b)·Γ_θ`: the rotation acts diagonally and the
/// affine image is projected back onto the basis by quadrature.
pub fn apply_group_element(g: &Su11Element, s: &CoeffState) -> Result<CoeffState> {
    apply_group_element_with(
        g,
        s,
        DEFAULT_PROJ_TOL,
        DEFAULT_N_MAX,
        &QuadratureScheme::default(),
    )
}

pub fn apply_group_element_with(
    g: &Su11Element,
    s: &CoeffState,
    proj_tol: f64,
    n_max: usize,
    scheme: &QuadratureScheme,
) -> Result<CoeffState> {
    let (m0, rot) = group::decompose_affine_rotation(&group::su11_to_sl2r(g))?;
    let rotated = apply_rotation(rot.theta(), s);
    if m0.a() == 1.0 && m0.b() == 0.0 {
        return Ok(rotated);
    }
    affine_project(&m0, &rotated, proj_tol, n_max, scheme)
}

fn affine_project(
    m0: &AffineElement,
    s: &CoeffState,
    proj_tol: f64,
    n_max: usize,
    scheme: &QuadratureScheme,
) -> Result<CoeffState> {
    let k = s.k;
    let image = realizations::affine_action(k, m0, &s.to_halfline());
    let target = s.norm_sqr();
    let mut n = (2 * s.order() + 16).min(n_max);
    loop {
        let proj = quadrature::project_onto_basis(k, &image, n, scheme)?;
        let captured: f64 = proj.values.iter().map(Complex64::norm_sqr).sum();
        let deficit = (target - captured).abs();
        if deficit <= proj_tol {
            return Ok(CoeffState {
                k,
                coeffs: proj.values,
                tail: deficit,
                leaked: s.leaked,
            });
        }
        if n >= n_max {
            return Err(Error::ProjectionError {
                residual: deficit,
                tol: proj_tol,
            });
        }
        n = (2 * n).min(n_max);
    }
}

/// `‖Σ cᵢ Opᵢ s‖`, with `None` standing for the identity; exact thanks to padding.
pub fn combination_residual(s: &CoeffState, terms: &[(Complex64, Option<Generator>)]) -> f64 {
    let t = s.padded(1);
    let mut acc = CoeffState::new(s.k, vec![Complex64::default(); t.coeffs.len()]);
    for (c, op) in terms {
        let v = match op {
            Some(op) => apply_generator(*op, &t),
            None => t.clone(),
        };
        acc = acc.add_scaled(*c, &v);
    }
    acc.norm()
}
