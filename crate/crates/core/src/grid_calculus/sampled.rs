use super::{masked_derivative, Grid, MatrixFunction};
use crate::error::{Error, Result};
use crate::CMatrix;

/// Matrix values on the nodes of a grid. `None` marks a masked node.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMatrix {
    grid: Grid,
    values: Vec<Option<CMatrix>>,
}

impl SampledMatrix {
    pub fn new(grid: Grid, values: Vec<Option<CMatrix>>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::LengthMismatch {
                expected: grid.count(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples of `f^{(order)}` at every node.
    pub fn from_function(f: &MatrixFunction, grid: &Grid, order: usize) -> Result<Self> {
        let values = (0..grid.count())
            .map(|i| f.eval_node(grid, i, grid.x(i), order).map(Some))
            .collect::<Result<_>>()?;
        Ok(Self { grid: *grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Option<CMatrix>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Option<CMatrix>> {
        self.values
    }

    pub fn at(&self, i: usize) -> Option<&CMatrix> {
        self.values.get(i).and_then(Option::as_ref)
    }

    pub fn masked_indices(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i].is_none()).collect()
    }

    pub fn masked_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Fourth-order first derivative with mask propagation.
    pub fn derivative(&self) -> Self {
        let values = masked_derivative(&self.values, &self.grid).expect("length matches the grid by construction");
        Self { grid: self.grid, values }
    }

    /// Node-wise combination; masked where either input is masked.
    pub fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        if !self.grid.same_nodes(&other.grid) {
            return Err(Error::DimensionMismatch("sampled values live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| Some(f(a.as_ref()?, b.as_ref()?)))
            .collect();
        Ok(Self { grid: self.grid, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_calculus::ScalarForm;

    #[test]
    fn derivative_propagates_masks() {
        let g = Grid::new(0.0, 1.0, 21).unwrap();
        let mut s = SampledMatrix::from_function(&MatrixFunction::scalar(ScalarForm::Sin { k: 1.0 }), &g, 0).unwrap();
        s.values[10] = None;
        let d = s.derivative();
        assert_eq!(d.masked_indices(), vec![8, 9, 10, 11, 12]);
        assert!((d.at(3).unwrap()[(0, 0)].re - g.x(3).cos()).abs() < 1e-6);
    }

    #[test]
    fn length_is_checked() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        assert!(SampledMatrix::new(g, vec![None; 10]).is_err());
    }
}
