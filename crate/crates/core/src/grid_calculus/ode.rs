//! Fixed-step RK4 propagation of `U'' = (V₀ - λ)U` for one vector column.
//!
//! Only the value and first derivative are integrated. Higher derivatives are
//! generated at every node from the equation itself,
//! `U^{(k+2)} = Σ_{m=0}^{k} C(k,m) V₀^{(k-m)} U^{(m)} - λ U^{(k)}`,
//! so they are exact functions of the propagated `(U, U')`.

use num_complex::Complex64;

use super::{binomial, FunctionSource, Grid, MatrixFunction, PotentialSpec};
use crate::error::{Error, Result};
use crate::{max_abs, CMatrix, CVector};

const BLOW_UP: f64 = 1e300;

/// One propagated column with its derivative table.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    function: MatrixFunction,
    lambda: f64,
    residual: f64,
}

impl OdeSolution {
    pub fn function(&self) -> &MatrixFunction {
        &self.function
    }

    pub fn into_function(self) -> MatrixFunction {
        self.function
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `max ‖-U'' + V₀U - λU‖ / max(1, ‖U‖)` over the nodes, `U''` taken from
    /// the derivative table.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

pub fn solve_matrix_schrodinger(
    spec: &PotentialSpec,
    lambda: f64,
    init_value: &[Complex64],
    init_deriv: &[Complex64],
    grid: &Grid,
    max_order: usize,
) -> Result<OdeSolution> {
    let n = spec.n();
    if init_value.len() != n || init_deriv.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial data must have {n} components (got {} and {})",
            init_value.len(),
            init_deriv.len()
        )));
    }
    let needed = max_order.saturating_sub(2);
    if spec.deriv_capability() < needed {
        return Err(Error::DerivativeCapability {
            requested: needed,
            available: spec.deriv_capability(),
        });
    }
    let max_order = max_order.max(1);
    let lam = Complex64::new(lambda, 0.0);
    let h = grid.spacing();

    let rhs = |x: f64, u: &CVector| -> Result<CVector> {
        let v = spec.eval(x, 0)?;
        Ok(&v * u - u * lam)
    };

    let mut u = CVector::from_column_slice(init_value);
    let mut du = CVector::from_column_slice(init_deriv);
    let mut values = Vec::with_capacity(grid.count());
    let mut derivs = Vec::with_capacity(grid.count());
    values.push(u.clone());
    derivs.push(du.clone());
    for i in 1..grid.count() {
        let x = grid.x(i - 1);
        let k1u = du.clone();
        let k1d = rhs(x, &u)?;
        let u2 = &u + &k1u * Complex64::new(h / 2.0, 0.0);
        let k2u = &du + &k1d * Complex64::new(h / 2.0, 0.0);
        let k2d = rhs(x + h / 2.0, &u2)?;
        let u3 = &u + &k2u * Complex64::new(h / 2.0, 0.0);
        let k3u = &du + &k2d * Complex64::new(h / 2.0, 0.0);
        let k3d = rhs(x + h / 2.0, &u3)?;
        let u4 = &u + &k3u * Complex64::new(h, 0.0);
        let k4u = &du + &k3d * Complex64::new(h, 0.0);
        let k4d = rhs(x + h, &u4)?;
        let w = Complex64::new(h / 6.0, 0.0);
        u += (&k1u + &k2u * Complex64::new(2.0, 0.0) + &k3u * Complex64::new(2.0, 0.0) + &k4u) * w;
        du += (&k1d + &k2d * Complex64::new(2.0, 0.0) + &k3d * Complex64::new(2.0, 0.0) + &k4d) * w;
        let size = u.iter().chain(du.iter()).fold(0.0_f64, |a, z| a.max(z.norm()));
        if !size.is_finite() || size > BLOW_UP {
            return Err(Error::BlowUp { index: i, x: grid.x(i) });
        }
        values.push(u.clone());
        derivs.push(du.clone());
    }

    // table[order][node]
    let mut table: Vec<Vec<CMatrix>> = vec![Vec::with_capacity(grid.count()); max_order + 1];
    let mut residual = 0.0_f64;
    for i in 0..grid.count() {
        let x = grid.x(i);
        let mut jet: Vec<CVector> = vec![values[i].clone(), derivs[i].clone()];
        let pots: Vec<CMatrix> = (0..=needed).map(|m| spec.eval(x, m)).collect::<Result<_>>()?;
        for k in 0..=max_order.saturating_sub(2) {
            if jet.len() > max_order {
                break;
            }
            let mut next = -&jet[k] * lam;
            for m in 0..=k {
                next += &pots[k - m] * &jet[m] * Complex64::new(binomial(k, m), 0.0);
            }
            jet.push(next);
        }
        for (order, d) in jet.into_iter().take(max_order + 1).enumerate() {
            table[order].push(CMatrix::from_column_slice(n, 1, d.as_slice()));
        }
        if max_order >= 2 {
            let r = -&table[2][i] + &pots[0] * &table[0][i] - &table[0][i] * lam;
            residual = residual.max(max_abs(&r) / max_abs(&table[0][i]).max(1.0));
        }
    }

    Ok(OdeSolution {
        function: MatrixFunction::sampled(*grid, table, FunctionSource::OdePropagated)?,
        lambda,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_calculus::{PotentialTerm, ScalarForm};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn free_growing_solution_is_exponential() {
        let g = Grid::new(0.0, 2.0, 401).unwrap();
        let sol = solve_matrix_schrodinger(&PotentialSpec::zero(1), -1.0, &[c(1.0)], &[c(1.0)], &g, 3).unwrap();
        for i in (0..g.count()).step_by(40) {
            let x = g.x(i);
            let v = sol.function().eval(x, 0).unwrap()[(0, 0)];
            assert!((v.re - x.exp()).abs() <= 1e-9 * x.exp(), "x = {x}: {v}");
            let d3 = sol.function().eval(x, 3).unwrap()[(0, 0)];
            assert!((d3.re - x.exp()).abs() <= 1e-9 * x.exp());
        }
        assert!(sol.residual() <= 1e-8);
    }

    #[test]
    fn cosh_from_boundary_data() {
        let k = 1.5;
        let g = Grid::new(-2.0, 2.0, 801).unwrap();
        let x0 = g.x_min();
        let sol = solve_matrix_schrodinger(
            &PotentialSpec::zero(1),
            -k * k,
            &[c((k * x0).cosh())],
            &[c(k * (k * x0).sinh())],
            &g,
            2,
        )
        .unwrap();
        let err = (0..g.count())
            .map(|i| {
                let x = g.x(i);
                (sol.function().eval(x, 0).unwrap()[(0, 0)].re - (k * x).cosh()).abs() / (k * x).cosh()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "relative error {err}");
    }

    #[test]
    fn derivative_table_matches_differences_for_coupled_potential() {
        let spec = PotentialSpec::coupled(
            2,
            vec![
                (0, 0, vec![PotentialTerm::new(-1.0, ScalarForm::Gaussian { a: 0.5 })]),
                (0, 1, vec![PotentialTerm::new(0.4, ScalarForm::Gaussian { a: 1.0 })]),
                (1, 1, vec![PotentialTerm::new(0.5, ScalarForm::Poly { coeffs: vec![1.0] })]),
            ],
        )
        .unwrap();
        let g = Grid::new(-3.0, 3.0, 601).unwrap();
        let sol = solve_matrix_schrodinger(&spec, -0.8, &[c(0.01), c(0.02)], &[c(0.01), c(-0.01)], &g, 4).unwrap();
        let h = g.spacing();
        let f = sol.function();
        for order in 0..4 {
            for i in (5..g.count() - 5).step_by(37) {
                let d: CMatrix = (f.eval(g.x(i - 2), order).unwrap()
                    - f.eval(g.x(i - 1), order).unwrap() * c(8.0)
                    + f.eval(g.x(i + 1), order).unwrap() * c(8.0)
                    - f.eval(g.x(i + 2), order).unwrap())
                    / c(12.0 * h);
                let exact = f.eval(g.x(i), order + 1).unwrap();
                let tol = 10.0 * h.powi(4) * max_abs(&exact).max(1.0);
                assert!(max_abs(&(d - &exact)) <= tol, "order {order} node {i}");
            }
        }
    }

    #[test]
    fn insufficient_potential_capability() {
        let g = Grid::new(0.0, 1.0, 101).unwrap();
        let values = vec![CMatrix::zeros(1, 1); 101];
        let spec = PotentialSpec::tabulated(g, values, 1).unwrap();
        let r = solve_matrix_schrodinger(&spec, 0.0, &[c(1.0)], &[c(0.0)], &g, 4);
        assert!(matches!(r, Err(Error::DerivativeCapability { requested: 2, available: 1 })));
    }

    #[test]
    fn blow_up_names_the_point() {
        let g = Grid::new(0.0, 800.0, 8001).unwrap();
        let r = solve_matrix_schrodinger(&PotentialSpec::zero(1), -1.0, &[c(1.0)], &[c(1.0)], &g, 2);
        match r {
            Err(Error::BlowUp { index, x }) => {
                assert!(x > 690.0 && x < 700.0, "x = {x}");
                assert_eq!(g.x(index), x);
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
