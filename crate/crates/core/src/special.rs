//! Laguerre polynomials, the polynomials `P_m`, factorial ratios and the
//! generating function.
//!
//! Factorials of half-integer arguments are read as shifted Gamma functions,
//! and every combinatorial weight is carried in log space.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::RepLabel;
use crate::error::{Error, Result};

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `[m]_k = m (2k + m − 1)`.
pub fn mk_bracket(m: usize, k: RepLabel) -> f64 {
    let m = m as f64;
    m * (k.two_k() as f64 + m - 1.0)
}

/// `log [m]_k! = log m! + log Γ(2k+m) − log Γ(2k)`.
pub fn log_mk_factorial(m: usize, k: RepLabel) -> f64 {
    let tk = k.two_k() as f64;
    let m = m as f64;
    ln_gamma(m + 1.0) + ln_gamma(tk + m) - ln_gamma(tk)
}

/// Log of the half-line normalization `(4π)^k / √Γ(2k)`.
pub fn log_norm_k(k: RepLabel) -> f64 {
    k.k() * (4.0 * PI).ln() - 0.5 * ln_gamma(k.two_k() as f64)
}

/// `L_m^α(x)` by upward recurrence in the degree.
pub fn laguerre(m: i64, alpha: f64, x: f64) -> Result<f64> {
    if m < 0 {
        return Err(Error::InvalidDegree(m));
    }
    if !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Laguerre α = {alpha} must exceed −1"
        )));
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..m {
        let n = n as f64;
        let next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

fn check_degree(m: i64) -> Result<usize> {
    usize::try_from(m).map_err(|_| Error::InvalidDegree(m))
}

fn check_y(y: f64) -> Result<()> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidParameter(format!("y = {y} must be positive")));
    }
    Ok(())
}

/// `P_m(y) = (−1)^m m! L_m^{2k−1}(4πy)`.
pub fn p_m(m: i64, k: RepLabel, y: f64) -> Result<f64> {
    let mu = check_degree(m)?;
    check_y(y)?;
    let l = laguerre(m, k.two_k() as f64 - 1.0, 4.0 * PI * y)?;
    let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * ln_gamma(mu as f64 + 1.0).exp() * l)
}

/// `dP_m/dy`, from `d/dx L_m^α = −L_{m−1}^{α+1}`.
pub fn p_m_derivative(m: i64, k: RepLabel, y: f64) -> Result<f64> {
    let mu = check_degree(m)?;
    check_y(y)?;
    if mu == 0 {
        return Ok(0.0);
    }
    let l = laguerre(m - 1, k.two_k() as f64, 4.0 * PI * y)?;
    let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
    Ok(-sign * ln_gamma(mu as f64 + 1.0).exp() * 4.0 * PI * l)
}

/// `(1+ζ)^{−2k} exp(4πy ζ/(ζ+1))`, principal branch.
pub fn generating_function(zeta: Complex64, k: RepLabel, y: f64) -> Result<Complex64> {
    crate::group::check_disk(zeta)?;
    let one = Complex64::new(1.0, 0.0);
    let w = one + zeta;
    Ok((-(k.two_k() as f64) * w.ln() + 4.0 * PI * y * zeta / w).exp())
}

/// Normalized polynomials `q_m(x) = (−1)^m √(m!/Γ(2k+m)) L_m^{2k−1}(x)` for
/// `m = 0..=n`, with `x q_m'` when `with_derivative` is set.
///
/// `⟨y|km⟩ = (4π)^k y^{2k−1} e^{−2πy} q_m(4πy)`.
pub fn normalized_laguerre(k: RepLabel, n: usize, x: f64) -> Vec<f64> {
    let mut q = Vec::with_capacity(n + 1);
    let tk = k.two_k() as f64;
    q.push((-0.5 * ln_gamma(tk)).exp());
    if n == 0 {
        return q;
    }
    let mut s_prev = 0.0;
    for m in 0..n {
        let mf = m as f64;
        let s_next = ((mf + 1.0) * (tk + mf)).sqrt();
        let qm1 = if m == 0 { 0.0 } else { q[m - 1] };
        let next = ((x - 2.0 * mf - tk) * q[m] - s_prev * qm1) / s_next;
        q.push(next);
        s_prev = s_next;
    }
    q
}

/// Values `q_m`, `x q_m'` and `x² q_m''` at `x` for `m = 0..=n`.
pub fn normalized_laguerre_jet(k: RepLabel, n: usize, x: f64) -> Vec<[f64; 3]> {
    let q = normalized_laguerre(k, n, x);
    let tk = k.two_k() as f64;
    (0..=n)
        .map(|m| {
            let mf = m as f64;
            let d1 = if m == 0 {
                0.0
            } else {
                mf * q[m] + (mf * (tk + mf - 1.0)).sqrt() * q[m - 1]
            };
            let d2 = -(tk - x) * d1 - mf * x * q[m];
            [q[m], d1, d2]
        })
        .collect()
}

/// Spherical Bessel functions `j_0(x) … j_{n−1}(x)` written into `out`.
///
/// Forward recurrence where it is stable (`n ≤ |x|`), otherwise Miller's
/// backward recurrence normalized against `j_0` or `j_1`.
pub fn spherical_bessel_j(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let ax = x.abs();
    if ax == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    let (s, c) = ax.sin_cos();
    let j0 = if ax < 1e-4 {
        1.0 - ax * ax / 6.0
    } else {
        s / ax
    };
    if n as f64 <= ax {
        out[0] = j0;
        if n > 1 {
            out[1] = s / (ax * ax) - c / ax;
        }
        for l in 2..n {
            out[l] = (2 * l - 1) as f64 / ax * out[l - 1] - out[l - 2];
        }
    } else {
        let start = n + 20 + ax.sqrt() as usize * 4;
        let (mut hi, mut mid) = (0.0f64, 1e-300f64);
        for l in (1..=start).rev() {
            let lo = (2 * l + 1) as f64 / ax * mid - hi;
            hi = mid;
            mid = lo;
            if l - 1 < n {
                out[l - 1] = mid;
            }
            if mid.abs() > 1e250 {
                hi *= 1e-250;
                mid *= 1e-250;
                for v in out.iter_mut().skip(l.saturating_sub(1)) {
                    *v *= 1e-250;
                }
            }
        }
        let scale = if ax < 1.0 || j0.abs() >= 0.1 || n < 2 {
            j0 / out[0]
        } else {
            (s / (ax * ax) - c / ax) / out[1]
        };
        for v in out.iter_mut() {
            *v *= scale;
        }
    }
    if x < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
}
