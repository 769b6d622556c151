//! The Morse fundamental state `φ₀(y) = (4π)^s/√Γ(2s) y^s e^{−2πy}` and its
//! affine family, always with `k = 1`.
//!
//! The potential `V(x) = V₀(e^{−2x} − 2e^{−x})` whose coherent states these
//! are is not modelled here.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{Generator, RepLabel};
use crate::error::{Error, Result};
use crate::group::AffineElement;
use crate::quadrature::{inner_product_halfline, QuadratureScheme};
use crate::realizations::{
    affine_action, generator_action_halfline, linear_combination, HalfLineFunction, ShapeHints,
};
use crate::special::ln_gamma;

pub fn label() -> RepLabel {
    RepLabel::new(2).expect("2k = 2 is valid")
}

#[derive(Debug, Clone)]
pub struct MorseFundamental {
    s: f64,
    phi0: HalfLineFunction,
}

impl MorseFundamental {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn function(&self) -> &HalfLineFunction {
        &self.phi0
    }
}

pub fn morse_fundamental(s: f64) -> Result<MorseFundamental> {
    if !(s > 0.5) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Morse parameter s = {s} must exceed 1/2"
        )));
    }
    let ln_c = s * (4.0 * PI).ln() - 0.5 * ln_gamma(2.0 * s);
    let hints = ShapeHints::decaying(s, 2.0 * PI, 0.0);
    let phi0 = HalfLineFunction::from_jet(label(), hints, move |y| {
        let f = (ln_c + s * y.ln() - 2.0 * PI * y).exp();
        let g = s / y - 2.0 * PI;
        [f.into(), (f * g).into(), (f * (g * g - s / (y * y))).into()]
    });
    Ok(MorseFundamental { s, phi0 })
}

pub fn morse_family(s: f64, m0: &AffineElement) -> Result<HalfLineFunction> {
    let f = morse_fundamental(s)?;
    Ok(affine_action(label(), m0, &f.phi0))
}

/// `‖(J₀ − ⟨J₀⟩)φ₀‖`; zero exactly when `φ₀` is a `J₀` eigenstate.
pub fn j0_eigen_residual(s: f64, scheme: &QuadratureScheme) -> Result<f64> {
    let f = morse_fundamental(s)?;
    let j0 = generator_action_halfline(Generator::J0, label(), &f.phi0)?;
    let mean = inner_product_halfline(&f.phi0, &j0, scheme)?.value;
    let r = linear_combination(
        label(),
        &[(Complex64::new(1.0, 0.0), j0), (-mean, f.phi0.clone())],
    );
    Ok(inner_product_halfline(&r, &r, scheme)?
        .value
        .re
        .max(0.0)
        .sqrt())
}
