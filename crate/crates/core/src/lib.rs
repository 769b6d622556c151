//! Discrete-series representations of SU(1,1) on the half-line.
//!
//! The crate covers the group in its SU(1,1), SL(2,R), affine and rotation
//! coordinates, the canonical Laguerre basis, Perelomov and affine coherent
//! states in three function spaces, an accuracy-controlled half-line
//! quadrature, a continuous wavelet engine built on the affine group, and the
//! uncertainty relations satisfied by the coherent states.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod algebra;
pub mod error;
pub mod group;
pub mod morse;
pub mod quadrature;
pub mod realizations;
pub mod special;
pub mod uncertainty;
pub mod verify;
pub mod wavelet;

pub use algebra::{CoeffState, Generator, RepLabel};
pub use error::{Error, Result};
pub use num_complex::Complex64;
