//! Continuous wavelet analysis and synthesis on `L²_k(ℝ⁺)` for the affine
//! family `σ_ab(y) = a^{1−k} e^{2πiby} σ₀(ay)`.
//!
//! Coefficients `C(a,b) = (ψ, σ_ab)` live on a grid uniform in `ln a` and `b`.
//! Integrals over `da db / a²` become trapezoid sums in `(ln a, b)` with cell
//! measure `Δln a · Δb / a`. For an admissible fiducial,
//! `∫∫ |(σ_ab, ψ)|² da db/a² = K ‖ψ‖²` with `K = ∫ |σ₀|² y^{−2k} dy`, and
//! reconstruction divides by `K`.
//!
//! A uniform `b` step `Δb` periodizes the reconstruction with period `1/Δb`;
//! synthesized functions are meaningful on `(0, 1/Δb)` only.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{coherent_prefix, RepLabel};
use crate::error::{Error, Result};
use crate::group::{affine_to_zeta, AffineElement};
use crate::morse::morse_fundamental;
use crate::quadrature::{self, integrate_fourier, QuadratureScheme, Shape};
use crate::realizations::{affine_action, basis_halfline, HalfLineFunction, ShapeHints};

pub const COVERAGE_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fiducial {
    /// `⟨y|k0⟩`, for which the affine family is the coherent-state family.
    Fundamental,
    Basis(usize),
    Morse(f64),
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Admissibility {
    Finite(f64),
    Divergent,
}

#[derive(Debug, Clone)]
pub struct MotherWavelet {
    sigma0: HalfLineFunction,
    kind: Fiducial,
    admissibility: Admissibility,
}

impl MotherWavelet {
    pub fn new(
        sigma0: HalfLineFunction,
        kind: Fiducial,
        scheme: &QuadratureScheme,
    ) -> Result<Self> {
        let admissibility = check_admissibility(&sigma0, scheme)?;
        Ok(Self {
            sigma0,
            kind,
            admissibility,
        })
    }

    pub fn fundamental(k: RepLabel) -> Result<Self> {
        Self::basis(k, 0)
    }

    pub fn basis(k: RepLabel, m: usize) -> Result<Self> {
        let kind = if m == 0 {
            Fiducial::Fundamental
        } else {
            Fiducial::Basis(m)
        };
        Self::new(
            basis_halfline(k, m as i64)?,
            kind,
            &QuadratureScheme::default(),
        )
    }

    pub fn morse(s: f64) -> Result<Self> {
        let f = morse_fundamental(s)?;
        Self::new(
            f.function().clone(),
            Fiducial::Morse(s),
            &QuadratureScheme::default(),
        )
    }

    pub fn k(&self) -> RepLabel {
        self.sigma0.k()
    }

    pub fn sigma0(&self) -> &HalfLineFunction {
        &self.sigma0
    }

    pub fn kind(&self) -> Fiducial {
        self.kind
    }

    pub fn admissibility(&self) -> Admissibility {
        self.admissibility
    }

    /// `1/K`, the factor multiplying the measure in reconstructions.
    pub fn reconstruction_constant(&self) -> Result<f64> {
        match self.admissibility {
            Admissibility::Finite(c) if c > 0.0 => Ok(1.0 / c),
            _ => Err(Error::NotAdmissible),
        }
    }
}

/// `∫₀^∞ |σ₀(y)|² y^{−2k} dy`, or `Divergent` when the power of `σ₀` at the
/// origin makes the integrand non-integrable.
pub fn check_admissibility(
    sigma0: &HalfLineFunction,
    scheme: &QuadratureScheme,
) -> Result<Admissibility> {
    let h = sigma0.hints();
    let tk = sigma0.k().two_k() as f64;
    let at_origin = h.support.is_none_or(|s| s.0 <= 0.0);
    if at_origin && 2.0 * h.origin_power - tk <= -1.0 {
        return Ok(Admissibility::Divergent);
    }
    let shape = Shape::product(h, h, -tk);
    let q = quadrature::integrate(
        &shape,
        |y| sigma0.eval(y).norm_sqr() * y.powf(-tk) + Complex64::default(),
        scheme,
    )?;
    Ok(Admissibility::Finite(q.value.re))
}

pub fn wavelet_family(w: &MotherWavelet, m0: &AffineElement) -> HalfLineFunction {
    affine_action(w.k(), m0, &w.sigma0)
}

/// A grid uniform in `ln a` and in `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub ln_a0: f64,
    pub d_ln_a: f64,
    pub n_a: usize,
    pub b0: f64,
    pub d_b: f64,
    pub n_b: usize,
}

impl GridSpec {
    pub fn new(
        a_min: f64,
        a_max: f64,
        n_a: usize,
        b_min: f64,
        b_max: f64,
        n_b: usize,
    ) -> Result<Self> {
        if !(a_min > 0.0) || !(a_max > a_min) || !(b_max > b_min) || n_a < 2 || n_b < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid a ∈ [{a_min}, {a_max}] × {n_a}, b ∈ [{b_min}, {b_max}] × {n_b}"
            )));
        }
        Ok(Self {
            ln_a0: a_min.ln(),
            d_ln_a: (a_max.ln() - a_min.ln()) / (n_a - 1) as f64,
            n_a,
            b0: b_min,
            d_b: (b_max - b_min) / (n_b - 1) as f64,
            n_b,
        })
    }

    /// A single cell of the given extent.
    pub fn single_cell(a: f64, b: f64, d_ln_a: f64, d_b: f64) -> Self {
        Self {
            ln_a0: a.ln(),
            d_ln_a,
            n_a: 1,
            b0: b,
            d_b,
            n_b: 1,
        }
    }

    /// `ln a ∈ [−10, 4.5]` in 75 points and `b ∈ [−32, 32]` in 257 points.
    ///
    /// Boundary cells hold well under 1% of the coefficient energy of the
    /// low basis states, and the alias-free window `1/Δb = 4` covers their
    /// effective support.
    pub fn default_grid() -> Self {
        Self::new((-10.0f64).exp(), 4.5f64.exp(), 75, -32.0, 32.0, 257)
            .expect("static grid is valid")
    }

    pub fn a(&self, i: usize) -> f64 {
        (self.ln_a0 + i as f64 * self.d_ln_a).exp()
    }

    pub fn b(&self, j: usize) -> f64 {
        self.b0 + j as f64 * self.d_b
    }

    pub fn a_values(&self) -> Vec<f64> {
        (0..self.n_a).map(|i| self.a(i)).collect()
    }

    pub fn b_values(&self) -> Vec<f64> {
        (0..self.n_b).map(|j| self.b(j)).collect()
    }

    pub fn a_max(&self) -> f64 {
        self.a(self.n_a - 1)
    }

    pub fn b_max(&self) -> f64 {
        self.b(self.n_b - 1)
    }

    pub fn cells(&self) -> usize {
        self.n_a * self.n_b
    }

    /// Period of the reconstruction in `y`.
    pub fn alias_limit(&self) -> f64 {
        1.0 / self.d_b
    }

    fn trapezoid(i: usize, n: usize) -> f64 {
        if n > 1 && (i == 0 || i + 1 == n) {
            0.5
        } else {
            1.0
        }
    }

    /// Quadrature weight of cell `(i, j)` for `da db / a²`.
    pub fn cell_weight(&self, i: usize, j: usize) -> f64 {
        Self::trapezoid(i, self.n_a) * Self::trapezoid(j, self.n_b) * self.d_ln_a * self.d_b
            / self.a(i)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n_a || j + 1 == self.n_b
    }

    /// Widens the `a` range by `f` at both ends and the `b` range by `f`
    /// about its center, and shrinks both steps by `f`.
    pub fn refine(&self, f: usize) -> Self {
        let f64f = f as f64;
        let d_ln_a = self.d_ln_a / f64f;
        let span = (self.n_a - 1) as f64 * self.d_ln_a + 2.0 * f64f.ln();
        let mut n_a = (span / d_ln_a - 1e-9).ceil() as usize + 1;
        if n_a.is_multiple_of(2) {
            n_a += 1;
        }
        let center = self.ln_a0 + 0.5 * (self.n_a - 1) as f64 * self.d_ln_a;
        let b_center = self.b0 + 0.5 * (self.n_b - 1) as f64 * self.d_b;
        let n_b = f * f * (self.n_b - 1) + 1;
        let d_b = self.d_b / f64f;
        Self {
            ln_a0: center - 0.5 * (n_a - 1) as f64 * d_ln_a,
            d_ln_a,
            n_a,
            b0: b_center - 0.5 * (n_b - 1) as f64 * d_b,
            d_b,
            n_b,
        }
    }

    /// Every other node in both directions, when both counts allow it.
    pub fn coarsen(&self) -> Option<Self> {
        if self.n_a < 3
            || self.n_b < 3
            || !(self.n_a - 1).is_multiple_of(2)
            || !(self.n_b - 1).is_multiple_of(2)
        {
            return None;
        }
        Some(Self {
            ln_a0: self.ln_a0,
            d_ln_a: 2.0 * self.d_ln_a,
            n_a: (self.n_a - 1) / 2 + 1,
            b0: self.b0,
            d_b: 2.0 * self.d_b,
            n_b: (self.n_b - 1) / 2 + 1,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellFlag {
    Ok,
    QuadratureFailure { achieved: f64 },
}

/// Wavelet coefficients on a grid, row-major in `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    pub k: RepLabel,
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
    pub flags: Vec<CellFlag>,
}

impl CoefficientGrid {
    pub fn zeros(k: RepLabel, spec: GridSpec) -> Self {
        Self {
            k,
            spec,
            values: vec![Complex64::default(); spec.cells()],
            flags: vec![CellFlag::Ok; spec.cells()],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.spec.n_b + j]
    }

    pub fn flag(&self, i: usize, j: usize) -> CellFlag {
        self.flags[i * self.spec.n_b + j]
    }

    pub fn failed_cells(&self) -> usize {
        self.flags.iter().filter(|f| **f != CellFlag::Ok).count()
    }

    /// `Σ w |C|²` over unflagged cells, without the reconstruction constant.
    pub fn energy(&self) -> f64 {
        self.weighted_energy().0
    }

    fn weighted_energy(&self) -> (f64, f64) {
        let s = &self.spec;
        let (mut total, mut boundary) = (0.0, 0.0);
        for i in 0..s.n_a {
            for j in 0..s.n_b {
                if self.flag(i, j) != CellFlag::Ok {
                    continue;
                }
                let e = s.cell_weight(i, j) * self.get(i, j).norm_sqr();
                total += e;
                if s.is_boundary(i, j) {
                    boundary += e;
                }
            }
        }
        (total, boundary)
    }

    /// Fraction of the coefficient energy held by boundary cells.
    pub fn boundary_fraction(&self) -> f64 {
        let (t, b) = self.weighted_energy();
        if t > 0.0 {
            b / t
        } else {
            0.0
        }
    }

    /// The sub-grid on `spec.coarsen()`.
    pub fn coarsened(&self) -> Option<Self> {
        let c = self.spec.coarsen()?;
        let mut g = Self::zeros(self.k, c);
        for i in 0..c.n_a {
            for j in 0..c.n_b {
                g.values[i * c.n_b + j] = self.get(2 * i, 2 * j);
                g.flags[i * c.n_b + j] = self.flag(2 * i, 2 * j);
            }
        }
        Some(g)
    }
}

/// `C(a,b) = (ψ, σ_ab)` on every grid node. Cells whose integral misses the
/// tolerance are flagged and left at the best available value.
pub fn analyze(
    psi: &HalfLineFunction,
    w: &MotherWavelet,
    spec: &GridSpec,
    scheme: &QuadratureScheme,
) -> Result<CoefficientGrid> {
    let k = w.k();
    let p = 1.0 - k.two_k() as f64;
    let bs = spec.b_values();
    let rows: Vec<Result<Vec<(Complex64, CellFlag)>>> = (0..spec.n_a)
        .into_par_iter()
        .map(|i| {
            let a = spec.a(i);
            let sa = affine_action(k, &AffineElement::new(a, 0.0)?, &w.sigma0);
            let shape = Shape::product(psi.hints(), sa.hints(), p);
            let f = |y: f64| psi.eval(y).conj() * sa.eval(y) * y.powf(p);
            let cells = integrate_fourier(&shape, f, &bs, scheme)?;
            Ok(cells
                .into_iter()
                .map(|c| match c {
                    Ok(q) => (q.value, CellFlag::Ok),
                    Err(Error::QuadratureFailure { achieved, .. }) => (
                        Complex64::default(),
                        CellFlag::QuadratureFailure { achieved },
                    ),
                    Err(_) => (
                        Complex64::default(),
                        CellFlag::QuadratureFailure { achieved: f64::NAN },
                    ),
                })
                .collect())
        })
        .collect();
    let mut grid = CoefficientGrid::zeros(k, *spec);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, (v, f)) in row?.into_iter().enumerate() {
            grid.values[i * spec.n_b + j] = v;
            grid.flags[i * spec.n_b + j] = f;
        }
    }
    let failed = grid.failed_cells();
    if failed > 0 {
        log::warn!(
            "{failed} of {} cells flagged for quadrature failure",
            spec.cells()
        );
    }
    Ok(grid)
}

struct SynthesisData {
    k: RepLabel,
    sigma0: HalfLineFunction,
    a: Vec<f64>,
    b0: f64,
    d_b: f64,
    rows: Vec<Vec<Complex64>>,
}

impl SynthesisData {
    fn new(grid: &CoefficientGrid, w: &MotherWavelet, constant: f64) -> Self {
        let s = &grid.spec;
        let rows = (0..s.n_a)
            .map(|i| {
                (0..s.n_b)
                    .map(|j| {
                        if grid.flag(i, j) == CellFlag::Ok {
                            constant * s.cell_weight(i, j) * grid.get(i, j).conj()
                        } else {
                            Complex64::default()
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            k: grid.k,
            sigma0: w.sigma0.clone(),
            a: s.a_values(),
            b0: s.b0,
            d_b: s.d_b,
            rows,
        }
    }

    fn eval(&self, y: f64) -> Complex64 {
        let n_b = self.rows.first().map_or(0, Vec::len);
        let mut phases = Vec::with_capacity(n_b);
        let mut z = Complex64::from_polar(1.0, 2.0 * PI * self.b0 * y);
        let step = Complex64::from_polar(1.0, 2.0 * PI * self.d_b * y);
        for _ in 0..n_b {
            phases.push(z);
            z *= step;
        }
        let kk = self.k.k();
        let mut total = quadrature::NeumaierSum::default();
        for (a, row) in self.a.iter().zip(&self.rows) {
            let s = self.sigma0.eval(a * y);
            if s == Complex64::default() {
                continue;
            }
            let inner: Complex64 = row.iter().zip(&phases).map(|(c, p)| c * p).sum();
            total.add(a.powf(1.0 - kk) * s * inner);
        }
        total.value()
    }
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub function: HalfLineFunction,
    /// Reconstructions are periodic in `y` with this period.
    pub alias_limit: f64,
    /// Relative L² difference against the every-other-node sub-grid.
    pub error_estimate: Option<f64>,
    pub coverage: f64,
    pub coverage_warning: bool,
    pub constant: f64,
}

fn synthesized_function(
    grid: &CoefficientGrid,
    w: &MotherWavelet,
    constant: f64,
) -> HalfLineFunction {
    let data = Arc::new(SynthesisData::new(grid, w, constant));
    let h = w.sigma0.hints();
    let hints = ShapeHints {
        origin_power: h.origin_power,
        decay_rate: None,
        poly_degree: h.poly_degree,
        frequency: 0.0,
        spread: grid.spec.b0.abs().max(grid.spec.b_max().abs()),
        support: Some((0.0, grid.spec.alias_limit())),
    };
    HalfLineFunction::from_fn(grid.k, hints, move |y| data.eval(y))
}

/// `ψ̂(y) = (1/K) Σ w(a,b) conj(C(a,b)) σ_ab(y)`.
pub fn synthesize(
    grid: &CoefficientGrid,
    w: &MotherWavelet,
    estimate_error: bool,
) -> Result<Synthesis> {
    if grid.k != w.k() {
        return Err(Error::InvalidLabel(format!(
            "grid has k = {}, wavelet k = {}",
            grid.k,
            w.k()
        )));
    }
    let constant = w.reconstruction_constant()?;
    let function = synthesized_function(grid, w, constant);
    let coverage = grid.boundary_fraction();
    let coverage_warning = coverage > COVERAGE_LIMIT;
    if coverage_warning {
        log::warn!(
            "boundary cells hold {:.2}% of the coefficient energy",
            100.0 * coverage
        );
    }
    let error_estimate = if estimate_error {
        grid.coarsened().and_then(|c| {
            let coarse = synthesized_function(&c, w, constant);
            let window = c.spec.alias_limit();
            relative_l2_distance(
                &function,
                &coarse,
                window,
                &QuadratureScheme::with_tol(1e-6),
            )
            .ok()
        })
    } else {
        None
    };
    Ok(Synthesis {
        function,
        alias_limit: grid.spec.alias_limit(),
        error_estimate,
        coverage,
        coverage_warning,
        constant,
    })
}

/// `‖f − g‖ / ‖g‖` over `(0, window)` in the `y^{1−2k}` measure.
pub fn relative_l2_distance(
    f: &HalfLineFunction,
    g: &HalfLineFunction,
    window: f64,
    scheme: &QuadratureScheme,
) -> Result<f64> {
    let k = g.k();
    let p = 1.0 - k.two_k() as f64;
    let mut shape = Shape::product(f.hints(), g.hints(), p);
    // Only functions whose support reaches the origin constrain the power there.
    let reaches_origin = |h: &ShapeHints| h.support.is_none_or(|s| s.0 <= 0.0);
    let q = [f.hints(), g.hints()]
        .into_iter()
        .filter(|h| reaches_origin(h))
        .map(|h| h.origin_power)
        .fold(f64::INFINITY, f64::min);
    shape.alpha = if q.is_finite() { 2.0 * q + p } else { 0.0 };
    shape.rate = None;
    shape.support = Some((0.0, window));
    shape.freq = 0.0;
    let r = quadrature::integrate_vec(
        &shape,
        2,
        |y, out: &mut [Complex64]| {
            let (a, b) = (f.eval(y), g.eval(y));
            let wy = y.powf(p);
            out[0] = ((a - b).norm_sqr() * wy).into();
            out[1] = (b.norm_sqr() * wy).into();
        },
        scheme,
    )?;
    Ok((r.values[0].re / r.values[1].re).max(0.0).sqrt())
}

/// `c = ‖σ₀‖² / Σ w |(σ₀, σ_ab)|²`, the constant that makes the discretized
/// frame reproduce the norm of the fiducial.
pub fn fitted_constant(
    w: &MotherWavelet,
    spec: &GridSpec,
    scheme: &QuadratureScheme,
) -> Result<f64> {
    let grid = analyze(&w.sigma0, w, spec, scheme)?;
    let norm = quadrature::inner_product_halfline(&w.sigma0, &w.sigma0, scheme)?
        .value
        .re;
    Ok(norm / grid.energy())
}

/// Measure density of `da db/a²` with the completeness constant `(2k−1)/(4π)`.
pub fn measure_density_ab(k: RepLabel, a: f64) -> f64 {
    (k.two_k() as f64 - 1.0) / (4.0 * PI * a * a)
}

/// The disk measure `(2k−1)/π · d²ζ / (1−|ζ|²)²` pulled back to `(a, b)`
/// through `ζ = (1−u)/(1+u)`, `u = a − ib`, using `|dζ/du| = |1+ζ|²/2`.
pub fn measure_density_via_zeta(k: RepLabel, a: f64, b: f64) -> f64 {
    let zeta = affine_to_zeta(&AffineElement::new(a, b).expect("positive scale"));
    let jac = 0.25 * (Complex64::new(1.0, 0.0) + zeta).norm_sqr().powi(2);
    (k.two_k() as f64 - 1.0) / PI * jac / (1.0 - zeta.norm_sqr()).powi(2)
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    /// Gram matrix `(φᵢ, φⱼ)` by direct quadrature.
    pub exact: Vec<Vec<Complex64>>,
    /// `(1/K) Σ w (φᵢ, σ_ab)(σ_ab, φⱼ)`.
    pub frame: Vec<Vec<Complex64>>,
    /// The same sum through coherent-state coefficients in `ζ`.
    pub zeta_route: Option<Vec<Vec<Complex64>>>,
    pub max_deviation: f64,
    pub zeta_deviation: Option<f64>,
    /// `max |frame − zeta_route|`.
    pub route_agreement: Option<f64>,
    /// `max |frame − frame on the every-other-node sub-grid|`.
    pub grid_error_estimate: Option<f64>,
}

fn frame_gram(grids: &[CoefficientGrid], constant: f64) -> Vec<Vec<Complex64>> {
    let n = grids.len();
    let mut g = vec![vec![Complex64::default(); n]; n];
    let spec = grids[0].spec;
    for (i, gi) in grids.iter().enumerate() {
        for (j, gj) in grids.iter().enumerate() {
            let mut acc = quadrature::NeumaierSum::default();
            for r in 0..spec.n_a {
                for c in 0..spec.n_b {
                    if gi.flag(r, c) != CellFlag::Ok || gj.flag(r, c) != CellFlag::Ok {
                        continue;
                    }
                    acc.add(spec.cell_weight(r, c) * gi.get(r, c) * gj.get(r, c).conj());
                }
            }
            g[i][j] = constant * acc.value();
        }
    }
    g
}

fn max_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn zeta_gram(
    k: RepLabel,
    states: &[HalfLineFunction],
    spec: &GridSpec,
    scheme: &QuadratureScheme,
) -> Result<Vec<Vec<Complex64>>> {
    let mut coeffs = Vec::new();
    for s in states {
        let norm = quadrature::inner_product_halfline(s, s, scheme)?.value.re;
        let mut n = 16;
        loop {
            let v = quadrature::project_onto_basis(k, s, n, scheme)?.values;
            let captured: f64 = v.iter().map(Complex64::norm_sqr).sum();
            if (norm - captured).abs() <= 1e-12 * norm.max(1.0) || n >= 256 {
                coeffs.push(v);
                break;
            }
            n *= 2;
        }
    }
    let n_max = coeffs.iter().map(Vec::len).max().unwrap_or(1) - 1;
    let c = (k.two_k() as f64 - 1.0) / PI;
    let n = states.len();
    let rows: Vec<Vec<Vec<Complex64>>> = (0..spec.n_a)
        .into_par_iter()
        .map(|r| {
            let mut g = vec![vec![Complex64::default(); n]; n];
            let a = spec.a(r);
            for col in 0..spec.n_b {
                let zeta =
                    affine_to_zeta(&AffineElement::new(a, spec.b(col)).expect("positive scale"));
                let cz = coherent_prefix(k, zeta, n_max).expect("ζ inside the disk");
                let ov: Vec<Complex64> = coeffs
                    .iter()
                    .map(|v| v.iter().zip(&cz).map(|(x, y)| x.conj() * y).sum())
                    .collect();
                let jac = 0.25 * (Complex64::new(1.0, 0.0) + zeta).norm_sqr().powi(2);
                let dens = c * jac / (1.0 - zeta.norm_sqr()).powi(2);
                let w = dens
                    * a
                    * spec.d_ln_a
                    * spec.d_b
                    * GridSpec::trapezoid(r, spec.n_a)
                    * GridSpec::trapezoid(col, spec.n_b);
                for i in 0..n {
                    for j in 0..n {
                        g[i][j] += w * ov[i] * ov[j].conj();
                    }
                }
            }
            g
        })
        .collect();
    let mut g = vec![vec![Complex64::default(); n]; n];
    for row in rows {
        for i in 0..n {
            for j in 0..n {
                g[i][j] += row[i][j];
            }
        }
    }
    Ok(g)
}

/// Compares the Gram matrix of `states` with its discretized frame
/// expansion; the fundamental fiducial also gets the `ζ`-coordinate route.
pub fn identity_resolution_check(
    w: &MotherWavelet,
    states: &[HalfLineFunction],
    spec: &GridSpec,
    scheme: &QuadratureScheme,
) -> Result<IdentityReport> {
    let constant = w.reconstruction_constant()?;
    let k = w.k();
    let exact = quadrature::gram_halfline(states, scheme)?;
    let grids = states
        .iter()
        .map(|s| analyze(s, w, spec, scheme))
        .collect::<Result<Vec<_>>>()?;
    let frame = frame_gram(&grids, constant);
    let max_deviation = max_diff(&frame, &exact);
    let grid_error_estimate = grids
        .iter()
        .map(CoefficientGrid::coarsened)
        .collect::<Option<Vec<_>>>()
        .map(|c| max_diff(&frame, &frame_gram(&c, constant)));
    let zeta_route = if w.kind() == Fiducial::Fundamental {
        Some(zeta_gram(k, states, spec, scheme)?)
    } else {
        None
    };
    let zeta_deviation = zeta_route.as_ref().map(|z| max_diff(z, &exact));
    let route_agreement = zeta_route.as_ref().map(|z| max_diff(z, &frame));
    Ok(IdentityReport {
        exact,
        frame,
        zeta_route,
        max_deviation,
        zeta_deviation,
        route_agreement,
        grid_error_estimate,
    })
}
