//! The first-order Darboux operator `L = D - F`, `F = U'U⁻¹`.

use rayon::prelude::*;

use super::jet::log_derivative_jet;
use super::DEGENERATE_FRACTION;
use crate::error::{Error, Result};
use crate::grid_calculus::{Grid, MatrixFunction, PotentialSpec, SampledMatrix};
use crate::CMatrix;

/// Highest derivative of `F` kept per node. Order 2 is what the intertwining
/// and factorization probes consume.
const MAX_JET_ORDER: usize = 3;

/// `L = D - F` sampled on a grid, with derivatives of `F` at each node.
#[derive(Debug, Clone)]
pub struct FirstOrderOperator {
    grid: Grid,
    order: usize,
    jets: Vec<Option<Vec<CMatrix>>>,
    singular: Vec<usize>,
}

impl FirstOrderOperator {
    /// Operator from precomputed jets of `F`. `None` marks singular nodes.
    pub fn from_jets(grid: Grid, jets: Vec<Option<Vec<CMatrix>>>) -> Result<Self> {
        if jets.len() != grid.count() {
            return Err(Error::LengthMismatch {
                expected: grid.count(),
                actual: jets.len(),
            });
        }
        let order = jets.iter().flatten().map(|j| j.len() - 1).min().unwrap_or(0);
        let singular = (0..jets.len()).filter(|&i| jets[i].is_none()).collect();
        Ok(Self { grid, order, jets, singular })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Highest derivative order of `F` available at every unmasked node.
    pub fn jet_order(&self) -> usize {
        self.order
    }

    /// Grid indices where the generator is numerically singular.
    pub fn singular_points(&self) -> &[usize] {
        &self.singular
    }

    /// `F^{(0..)}` at node `i`, `None` if masked.
    pub fn jet(&self, i: usize) -> Option<&[CMatrix]> {
        self.jets.get(i)?.as_deref()
    }

    /// `F^{(order)}` on the grid.
    pub fn superpotential(&self, order: usize) -> Result<SampledMatrix> {
        if order > self.order {
            return Err(Error::DerivativeCapability {
                requested: order,
                available: self.order,
            });
        }
        SampledMatrix::new(self.grid, self.jets.iter().map(|j| j.as_ref().map(|j| j[order].clone())).collect())
    }
}

/// Builds `L = D - U'U⁻¹` for an `n × n` generator.
pub fn make_first_order(u: &MatrixFunction, grid: &Grid) -> Result<FirstOrderOperator> {
    if u.rows() != u.cols() {
        return Err(Error::DimensionMismatch(format!("generator must be square, got {}x{}", u.rows(), u.cols())));
    }
    if u.max_order() < 1 {
        return Err(Error::DerivativeCapability {
            requested: 1,
            available: u.max_order(),
        });
    }
    let order = (u.max_order() - 1).min(MAX_JET_ORDER);
    let jets = (0..grid.count())
        .into_par_iter()
        .map(|i| Ok(log_derivative_jet(&u.jet_node(grid, i, order + 1)?, order)))
        .collect::<Result<Vec<_>>>()?;
    let op = FirstOrderOperator::from_jets(*grid, jets)?;
    let fraction = op.singular.len() as f64 / grid.count() as f64;
    if fraction > DEGENERATE_FRACTION {
        return Err(Error::DegenerateInput {
            what: "the generator U".into(),
            fraction: 100.0 * fraction,
        });
    }
    if !op.singular.is_empty() {
        log::warn!("generator singular at {} grid points", op.singular.len());
    }
    Ok(op)
}

/// `G'(x) - F(x)G(x)` at a grid node.
pub fn apply_operator(op: &FirstOrderOperator, g: &MatrixFunction, x: f64) -> Result<CMatrix> {
    let grid = op.grid();
    if !grid.contains(x) {
        return Err(Error::Domain {
            x,
            x_min: grid.x_min(),
            x_max: grid.x_max(),
        });
    }
    let i = grid.locate(x).ok_or(Error::NotGridNode { x })?;
    let f = op.jet(i).ok_or(Error::Masked { x })?;
    let jet = g.jet_node(grid, i, 1)?;
    if jet[0].nrows() != f[0].ncols() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, argument has {} rows",
            f[0].nrows(),
            f[0].ncols(),
            jet[0].nrows()
        )));
    }
    Ok(&jet[1] - &f[0] * &jet[0])
}

/// `V₁ = V₀ - 2F'` on the grid. `F'` comes from the exact jet when `U` has
/// a second derivative, otherwise from fourth-order differences of `F`.
pub fn transform_potential_once(v0: &PotentialSpec, u: &MatrixFunction, grid: &Grid) -> Result<SampledMatrix> {
    if v0.n() != u.rows() {
        return Err(Error::DimensionMismatch(format!("potential is {0}x{0}, generator has {1} rows", v0.n(), u.rows())));
    }
    let op = make_first_order(u, grid)?;
    let df = if op.jet_order() >= 1 {
        op.superpotential(1)?
    } else {
        op.superpotential(0)?.derivative()
    };
    potential_shift(v0, &df)
}

/// `V₀ - 2F'` with masks carried over from `F'`.
pub(crate) fn potential_shift(v0: &PotentialSpec, df: &SampledMatrix) -> Result<SampledMatrix> {
    let grid = *df.grid();
    let values = df
        .values()
        .iter()
        .enumerate()
        .map(|(i, d)| match d {
            Some(d) => Ok(Some(v0.eval(grid.x(i), 0)? - d * num_complex::Complex64::new(2.0, 0.0))),
            None => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    SampledMatrix::new(grid, values)
}
