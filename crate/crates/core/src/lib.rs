//! Chains of Darboux transformations for the n-channel matrix Schrödinger
//! equation `-Ψ'' + V₀(x)Ψ = EΨ`.
//!
//! Two independent engines compute the result of N chained first-order
//! transformations:
//!
//! * [`darboux::chain_stepwise`] applies the operators `L = D - Y'Y⁻¹` one
//!   after another, propagating exact derivative jets through every step.
//! * [`darboux::closed_form_chain`] evaluates the bordered Wronskian
//!   determinant formulas directly, one grid point at a time.
//!
//! The [`detkit`] and [`verify`] modules turn the determinant identities the
//! closed form relies on (Sylvester's identity, the embordering-minor lemma,
//! the Wronskian derivative rule) into machine-checkable residuals.

#![allow(clippy::needless_range_loop)]

pub mod darboux;
pub mod detkit;
pub mod error;
pub mod grid_calculus;
pub mod verify;
pub mod wronskian;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use error::{Error, Result};

/// Dense complex matrix used for potentials, transformation functions and
/// Wronskians.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector (transformed states).
pub type CVector = DVector<Complex64>;

/// Largest entry modulus. All residuals in this crate are measured in this
/// norm.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Same as [`max_abs`] for vectors.
pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |M - M†|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}
