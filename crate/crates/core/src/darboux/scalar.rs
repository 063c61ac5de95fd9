//! Scalar (n = 1) Crum-Krein formulas, assembled directly from ordinary
//! Wronskians of scalar functions.

use num_complex::Complex64;

use crate::detkit::{det, is_numerically_singular};
use crate::error::{Error, Result};
use crate::grid_calculus::{finite_difference, Grid, MatrixFunction, PotentialSpec};
use crate::CMatrix;

/// Samples from [`scalar_crum`]; `None` where `W(u_1 … u_N)` vanishes
/// numerically or a differencing stencil touches such a node.
#[derive(Debug, Clone)]
pub struct ScalarCrum {
    /// `φ = W(u_1 … u_N, ψ) / W(u_1 … u_N)`.
    pub phi: Vec<Option<Complex64>>,
    /// `W̃ / W = (ln W)'`.
    pub log_derivative: Vec<Option<Complex64>>,
    /// `V_N = V₀ - 2(W̃/W)'`.
    pub potential: Vec<Option<Complex64>>,
}

fn value(f: &MatrixFunction, grid: &Grid, i: usize, order: usize) -> Result<Complex64> {
    Ok(f.eval_node(grid, i, grid.x(i), order)?[(0, 0)])
}

/// Square Wronskian of `funcs` with rows for derivative orders `0..len - 1`,
/// the last row raised by `lift` orders.
fn scalar_wronskian(funcs: &[&MatrixFunction], grid: &Grid, i: usize, lift: usize) -> Result<CMatrix> {
    let size = funcs.len();
    let mut m = CMatrix::zeros(size, size);
    for (c, f) in funcs.iter().enumerate() {
        for r in 0..size {
            let order = if r + 1 == size { r + lift } else { r };
            m[(r, c)] = value(f, grid, i, order)?;
        }
    }
    Ok(m)
}

pub fn scalar_crum(u_list: &[MatrixFunction], psi: &MatrixFunction, v0: &PotentialSpec, grid: &Grid) -> Result<ScalarCrum> {
    let all_scalar = u_list.iter().chain(std::iter::once(psi)).all(|f| f.rows() == 1 && f.cols() == 1);
    if !all_scalar || v0.n() != 1 {
        return Err(Error::DimensionMismatch("scalar Crum-Krein formulas need 1x1 inputs".into()));
    }
    if u_list.is_empty() {
        return Err(Error::InvalidSet("the set is empty".into()));
    }
    let us: Vec<&MatrixFunction> = u_list.iter().collect();
    let mut with_psi = us.clone();
    with_psi.push(psi);

    let count = grid.count();
    let mut phi = Vec::with_capacity(count);
    let mut log_derivative = Vec::with_capacity(count);
    for i in 0..count {
        let w_matrix = scalar_wronskian(&us, grid, i, 0)?;
        let w = det(&w_matrix);
        if is_numerically_singular(&w_matrix, w) {
            phi.push(None);
            log_derivative.push(None);
            continue;
        }
        phi.push(Some(det(&scalar_wronskian(&with_psi, grid, i, 0)?) / w));
        log_derivative.push(Some(det(&scalar_wronskian(&us, grid, i, 1)?) / w));
    }

    // A node is masked when any node within the widest stencil reach is.
    let filled: Vec<Complex64> = log_derivative.iter().map(|v| v.unwrap_or_default()).collect();
    let d = finite_difference(&filled, grid)?;
    let potential = (0..count)
        .map(|i| {
            let lo = i.saturating_sub(4);
            let hi = (i + 4).min(count - 1);
            if log_derivative[lo..=hi].iter().any(Option::is_none) {
                return Ok(None);
            }
            Ok(Some(v0.eval(grid.x(i), 0)?[(0, 0)] - d[i] * 2.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarCrum {
        phi,
        log_derivative,
        potential,
    })
}
