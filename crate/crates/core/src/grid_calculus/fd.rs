//! Fourth-order finite differences on a uniform grid.
//!
//! Interior nodes use the 5-point centered stencil; the two nodes nearest each
//! boundary use the 5-point one-sided/biased stencils of the same order, so
//! every output node is accurate to O(h⁴).

use num_complex::Complex64;

use super::Grid;
use crate::error::{Error, Result};
use crate::{CMatrix, CVector};

/// Half-width of the centered first-derivative stencil.
pub const FIRST_DERIVATIVE_WIDTH: usize = 2;

const CENTERED: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const FORWARD_0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const FORWARD_1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
const BACKWARD_1: [f64; 5] = [-1.0, 6.0, -18.0, 10.0, 3.0];
const BACKWARD_0: [f64; 5] = [3.0, -16.0, 36.0, -48.0, 25.0];
const SECOND_CENTERED: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

/// Values that can be linearly combined by a stencil.
pub trait Sample: Clone {
    fn combine(terms: &[(f64, &Self)]) -> Self;
}

impl Sample for Complex64 {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (w, z)| acc + **z * *w)
    }
}

impl Sample for CMatrix {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let (r, c) = terms[0].1.shape();
        let mut out = CMatrix::zeros(r, c);
        for (w, m) in terms {
            out.zip_apply(*m, |o, v| *o += v * *w);
        }
        out
    }
}

impl Sample for CVector {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let mut out = CVector::zeros(terms[0].1.len());
        for (w, m) in terms {
            out.zip_apply(*m, |o, v| *o += v * *w);
        }
        out
    }
}

/// First offset and weights (numerators over 12h) of the stencil used at
/// node `i` of a sequence of length `len`.
fn first_stencil(i: usize, len: usize) -> (usize, &'static [f64; 5]) {
    match i {
        0 => (0, &FORWARD_0),
        1 => (0, &FORWARD_1),
        _ if i + 1 == len => (len - 5, &BACKWARD_0),
        _ if i + 2 == len => (len - 5, &BACKWARD_1),
        _ => (i - 2, &CENTERED),
    }
}

/// First derivative of scalar samples, same length as the input.
pub fn finite_difference(samples: &[Complex64], grid: &Grid) -> Result<Vec<Complex64>> {
    if samples.len() != grid.count() {
        return Err(Error::LengthMismatch {
            expected: grid.count(),
            actual: samples.len(),
        });
    }
    let scale = 1.0 / (12.0 * grid.spacing());
    Ok((0..samples.len())
        .map(|i| {
            let (start, w) = first_stencil(i, samples.len());
            (0..5).fold(Complex64::new(0.0, 0.0), |acc, m| {
                acc + samples[start + m] * (w[m] * scale)
            })
        })
        .collect())
}

/// First derivative of masked samples. A node is masked in the output when
/// it, or any node of its stencil, is masked in the input.
pub fn masked_derivative<T: Sample>(samples: &[Option<T>], grid: &Grid) -> Result<Vec<Option<T>>> {
    if samples.len() != grid.count() {
        return Err(Error::LengthMismatch {
            expected: grid.count(),
            actual: samples.len(),
        });
    }
    let scale = 1.0 / (12.0 * grid.spacing());
    Ok((0..samples.len())
        .map(|i| {
            samples[i].as_ref()?;
            let (start, w) = first_stencil(i, samples.len());
            let mut terms = Vec::with_capacity(4);
            for m in 0..5 {
                if w[m] == 0.0 {
                    continue;
                }
                terms.push((w[m] * scale, samples[start + m].as_ref()?));
            }
            Some(T::combine(&terms))
        })
        .collect())
}

/// Centered 4th-order second derivative at interior node `i`. `None` at the
/// two nodes nearest each boundary or when the stencil touches a masked node.
pub fn second_difference<T: Sample>(samples: &[Option<T>], grid: &Grid, i: usize) -> Option<T> {
    if i < 2 || i + 2 >= samples.len() {
        return None;
    }
    let scale = 1.0 / (12.0 * grid.spacing() * grid.spacing());
    let mut terms = Vec::with_capacity(5);
    for m in 0..5 {
        terms.push((SECOND_CENTERED[m] * scale, samples[i - 2 + m].as_ref()?));
    }
    Some(T::combine(&terms))
}
