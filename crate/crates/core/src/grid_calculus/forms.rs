use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Closed-form scalar functions with derivatives of every order.
///
/// The trigonometric and hyperbolic forms solve `-u'' = λu` with
/// `λ = -k²` (exp, cosh, sinh) or `λ = k²` (cos, sin, expi), which is how
/// transformation functions of the zero potential are built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum ScalarForm {
    /// `e^{kx}`
    Exp { k: f64 },
    /// `cosh(kx)`
    Cosh { k: f64 },
    /// `sinh(kx)`
    Sinh { k: f64 },
    /// `cos(kx)`
    Cos { k: f64 },
    /// `sin(kx)`
    Sin { k: f64 },
    /// `e^{ikx}`
    Expi { k: f64 },
    /// `Σ c_p x^p`
    Poly { coeffs: Vec<f64> },
    /// `e^{-a x²}`
    Gaussian { a: f64 },
}

impl ScalarForm {
    /// `d^order/dx^order` of the form at `x`.
    pub fn derivative(&self, x: f64, order: usize) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        match *self {
            ScalarForm::Exp { k } => re(k.powi(order as i32) * (k * x).exp()),
            ScalarForm::Cosh { k } => {
                let base = if order.is_multiple_of(2) { (k * x).cosh() } else { (k * x).sinh() };
                re(k.powi(order as i32) * base)
            }
            ScalarForm::Sinh { k } => {
                let base = if order.is_multiple_of(2) { (k * x).sinh() } else { (k * x).cosh() };
                re(k.powi(order as i32) * base)
            }
            ScalarForm::Cos { k } => {
                let (s, c) = (k * x).sin_cos();
                let base = [c, -s, -c, s][order % 4];
                re(k.powi(order as i32) * base)
            }
            ScalarForm::Sin { k } => {
                let (s, c) = (k * x).sin_cos();
                let base = [s, c, -s, -c][order % 4];
                re(k.powi(order as i32) * base)
            }
            ScalarForm::Expi { k } => {
                Complex64::new(0.0, k).powu(order as u32) * Complex64::new(0.0, k * x).exp()
            }
            ScalarForm::Poly { ref coeffs } => {
                let mut acc = 0.0;
                for p in (order..coeffs.len()).rev() {
                    let falling: f64 = (0..order).map(|m| (p - m) as f64).product();
                    acc = acc * x + coeffs[p] * falling;
                }
                re(acc)
            }
            ScalarForm::Gaussian { a } => {
                // d^m e^{-a x²} = (-√a)^m H_m(√a x) e^{-a x²}, physicists' Hermite.
                let s = a.sqrt();
                let t = s * x;
                let (mut h0, mut h1) = (1.0, 2.0 * t);
                let hm = match order {
                    0 => h0,
                    _ => {
                        for m in 1..order {
                            let h2 = 2.0 * t * h1 - 2.0 * m as f64 * h0;
                            h0 = h1;
                            h1 = h2;
                        }
                        h1
                    }
                };
                re((-s).powi(order as i32) * hm * (-a * x * x).exp())
            }
        }
    }

    /// Whether the form is real-valued for real `x`.
    pub fn is_real(&self) -> bool {
        !matches!(self, ScalarForm::Expi { .. })
    }

    /// The energy `λ` with `-u'' = λu`, when the form solves the free equation.
    pub fn free_eigenvalue(&self) -> Option<f64> {
        match *self {
            ScalarForm::Exp { k } | ScalarForm::Cosh { k } | ScalarForm::Sinh { k } => Some(-k * k),
            ScalarForm::Cos { k } | ScalarForm::Sin { k } | ScalarForm::Expi { k } => Some(k * k),
            ScalarForm::Poly { ref coeffs } if coeffs.len() <= 2 => Some(0.0),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Central difference of order `m - 1` derivative, O(h²).
    fn check_derivatives(f: &ScalarForm, x: f64) {
        let h = 1e-4;
        for m in 1..6 {
            let fd = (f.derivative(x + h, m - 1) - f.derivative(x - h, m - 1)) / (2.0 * h);
            let exact = f.derivative(x, m);
            let scale = 1.0 + exact.norm();
            assert!(
                (fd - exact).norm() <= 1e-6 * scale,
                "{f:?} order {m} at {x}: fd {fd} exact {exact}"
            );
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let forms = [
            ScalarForm::Exp { k: 1.3 },
            ScalarForm::Cosh { k: 0.7 },
            ScalarForm::Sinh { k: 2.0 },
            ScalarForm::Cos { k: 1.1 },
            ScalarForm::Sin { k: 0.4 },
            ScalarForm::Expi { k: 1.7 },
            ScalarForm::Poly { coeffs: vec![1.0, -2.0, 0.5, 0.25] },
            ScalarForm::Gaussian { a: 0.8 },
        ];
        for f in &forms {
            for x in [-1.2, 0.0, 0.35, 2.0] {
                check_derivatives(f, x);
            }
        }
    }

    #[test]
    fn poly_values() {
        let p = ScalarForm::Poly { coeffs: vec![0.0, 0.0, 1.0] };
        assert_eq!(p.derivative(3.0, 0).re, 9.0);
        assert_eq!(p.derivative(3.0, 1).re, 6.0);
        assert_eq!(p.derivative(3.0, 2).re, 2.0);
        assert_eq!(p.derivative(3.0, 3).re, 0.0);
    }

    #[test]
    fn free_forms_solve_the_free_equation() {
        for f in [
            ScalarForm::Exp { k: 0.9 },
            ScalarForm::Cosh { k: 1.4 },
            ScalarForm::Sin { k: 2.2 },
            ScalarForm::Expi { k: 0.6 },
        ] {
            let lam = f.free_eigenvalue().unwrap();
            let x = 0.37;
            let r = -f.derivative(x, 2) - f.derivative(x, 0) * lam;
            assert!(r.norm() < 1e-12);
        }
    }
}
