//! Pointwise derivative jets of `F = U'U⁻¹` and of `(D - F)G`.
//!
//! From `U' = FU` the Leibniz rule gives
//! `U^{(m+1)} = Σ_{r=0}^{m} C(m,r) F^{(r)} U^{(m-r)}`, which is solved for
//! `F^{(m)}` order by order. Both recursions are exact, so jets propagated
//! through a chain of steps carry no differencing error.

use num_complex::Complex64;

use crate::detkit::{det, is_numerically_singular};
use crate::grid_calculus::binomial;
use crate::CMatrix;

fn scale(m: &CMatrix, w: f64) -> CMatrix {
    m * Complex64::new(w, 0.0)
}

/// `F^{(0..=order)}` for `F = U'U⁻¹` from the jet `U^{(0..=order+1)}`.
/// `None` when `U` is numerically singular.
pub fn log_derivative_jet(u: &[CMatrix], order: usize) -> Option<Vec<CMatrix>> {
    assert!(u.len() > order + 1, "jet of U must reach order {}", order + 1);
    if is_numerically_singular(&u[0], det(&u[0])) {
        return None;
    }
    let inv = u[0].clone().try_inverse()?;
    let mut f: Vec<CMatrix> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut acc = u[m + 1].clone();
        for (r, fr) in f.iter().enumerate() {
            acc -= scale(&(fr * &u[m - r]), binomial(m, r));
        }
        f.push(acc * &inv);
    }
    Some(f)
}

/// `((D - F)G)^{(0..=order)}` from `F^{(0..=order)}` and `G^{(0..=order+1)}`.
pub fn apply_jet(f: &[CMatrix], g: &[CMatrix], order: usize) -> Vec<CMatrix> {
    assert!(f.len() > order && g.len() > order + 1, "jets too short for order {order}");
    (0..=order)
        .map(|m| {
            let mut acc = g[m + 1].clone();
            for r in 0..=m {
                acc -= scale(&(&f[r] * &g[m - r]), binomial(m, r));
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_calculus::{MatrixFunction, ScalarForm};
    use crate::max_abs;

    #[test]
    fn cosh_log_derivative_jet() {
        let x: f64 = 0.4;
        let u = MatrixFunction::scalar(ScalarForm::Cosh { k: 1.0 }).jet(x, 4).unwrap();
        let f = log_derivative_jet(&u, 3).unwrap();
        let t = x.tanh();
        let s2 = 1.0 - t * t;
        let exact = [t, s2, -2.0 * t * s2, -2.0 * s2 * s2 + 4.0 * t * t * s2];
        for (m, e) in exact.iter().enumerate() {
            assert!((f[m][(0, 0)].re - e).abs() < 1e-14, "order {m}");
        }
    }

    #[test]
    fn operator_annihilates_its_generator_to_every_order() {
        let u = MatrixFunction::analytic_diagonal(vec![ScalarForm::Cosh { k: 0.7 }, ScalarForm::Exp { k: -1.2 }])
            .unwrap()
            .jet(0.3, 5)
            .unwrap();
        let f = log_derivative_jet(&u, 4).unwrap();
        for r in apply_jet(&f, &u, 3) {
            assert!(max_abs(&r) < 1e-14);
        }
    }

    #[test]
    fn singular_generator() {
        let u = MatrixFunction::scalar(ScalarForm::Sinh { k: 1.0 }).jet(0.0, 2).unwrap();
        assert!(log_derivative_jet(&u, 1).is_none());
    }

    #[test]
    fn plane_wave_through_exponential() {
        let (k, q, x) = (0.8, 1.3, -0.2);
        let f = log_derivative_jet(&MatrixFunction::scalar(ScalarForm::Exp { k }).jet(x, 1).unwrap(), 0).unwrap();
        let psi = MatrixFunction::scalar(ScalarForm::Expi { k: q }).jet(x, 1).unwrap();
        let out = apply_jet(&f, &psi, 0)[0][(0, 0)];
        let expected = Complex64::new(-k, q) * Complex64::new(0.0, q * x).exp();
        assert!((out - expected).norm() < 1e-14);
    }
}
