use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Grid, ScalarForm};
use crate::error::{Error, Result};
use crate::CMatrix;

/// One term `vector · form(x)` of an analytic column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisTerm {
    #[serde(flatten)]
    pub form: ScalarForm,
    /// Mixing coefficients, one per channel.
    pub vector: Vec<Complex64>,
}

/// A column given as a finite sum of analytic terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticColumn {
    pub terms: Vec<BasisTerm>,
}

impl AnalyticColumn {
    pub fn single(form: ScalarForm, vector: Vec<Complex64>) -> Self {
        Self {
            terms: vec![BasisTerm { form, vector }],
        }
    }

    fn rows(&self) -> Option<usize> {
        self.terms.first().map(|t| t.vector.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionSource {
    AnalyticBasis,
    OdePropagated,
    Tabulated,
}

#[derive(Debug, Clone)]
enum Repr {
    Analytic(Vec<AnalyticColumn>),
    /// `table[order][node]`
    Sampled { grid: Grid, table: Vec<Vec<CMatrix>> },
}

/// A `rows × cols` complex-matrix-valued function of `x` with derivatives up
/// to `max_order`.
///
/// Analytic functions evaluate anywhere; sampled ones (ODE-propagated or
/// tabulated) only at grid nodes.
#[derive(Debug, Clone)]
pub struct MatrixFunction {
    rows: usize,
    cols: usize,
    max_order: usize,
    source: FunctionSource,
    repr: Repr,
}

impl MatrixFunction {
    /// Analytic functions report this as their derivative capability.
    pub const UNBOUNDED_ORDER: usize = usize::MAX;

    pub fn analytic(columns: Vec<AnalyticColumn>) -> Result<Self> {
        let rows = columns
            .first()
            .and_then(AnalyticColumn::rows)
            .ok_or_else(|| Error::DimensionMismatch("analytic function needs at least one non-empty column".into()))?;
        for (j, col) in columns.iter().enumerate() {
            if col.terms.is_empty() {
                return Err(Error::DimensionMismatch(format!("column {j} has no terms")));
            }
            if col.terms.iter().any(|t| t.vector.len() != rows) {
                return Err(Error::DimensionMismatch(format!(
                    "column {j}: every mixing vector must have {rows} entries"
                )));
            }
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            max_order: Self::UNBOUNDED_ORDER,
            source: FunctionSource::AnalyticBasis,
            repr: Repr::Analytic(columns),
        })
    }

    /// `diag(f_1(x), …, f_n(x))`.
    pub fn analytic_diagonal(forms: Vec<ScalarForm>) -> Result<Self> {
        let n = forms.len();
        let columns = forms
            .into_iter()
            .enumerate()
            .map(|(j, f)| {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[j] = Complex64::new(1.0, 0.0);
                AnalyticColumn::single(f, v)
            })
            .collect();
        Self::analytic(columns)
    }

    /// 1×1 analytic function.
    pub fn scalar(form: ScalarForm) -> Self {
        Self::analytic(vec![AnalyticColumn::single(form, vec![Complex64::new(1.0, 0.0)])])
            .expect("single term column is well formed")
    }

    /// Sampled function from a derivative table `table[order][node]`.
    pub fn sampled(grid: Grid, table: Vec<Vec<CMatrix>>, source: FunctionSource) -> Result<Self> {
        let first = table
            .first()
            .and_then(|t| t.first())
            .ok_or_else(|| Error::DimensionMismatch("empty derivative table".into()))?;
        let (rows, cols) = first.shape();
        for (order, samples) in table.iter().enumerate() {
            if samples.len() != grid.count() {
                return Err(Error::LengthMismatch {
                    expected: grid.count(),
                    actual: samples.len(),
                });
            }
            if samples.iter().any(|m| m.shape() != (rows, cols)) {
                return Err(Error::DimensionMismatch(format!(
                    "order {order} samples are not all {rows}x{cols}"
                )));
            }
        }
        Ok(Self {
            rows,
            cols,
            max_order: table.len() - 1,
            source,
            repr: Repr::Sampled { grid, table },
        })
    }

    /// Concatenate column functions (each `rows × 1`) into one matrix function.
    /// Derivative capability is the minimum over the inputs.
    pub fn from_columns(columns: &[MatrixFunction]) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::DimensionMismatch("no columns".into()))?;
        if columns.iter().any(|c| c.rows != first.rows) {
            return Err(Error::DimensionMismatch("columns have different heights".into()));
        }
        if columns.iter().all(|c| matches!(c.repr, Repr::Analytic(_))) {
            let mut all = Vec::new();
            for c in columns {
                if let Repr::Analytic(cols) = &c.repr {
                    all.extend(cols.iter().cloned());
                }
            }
            return Self::analytic(all);
        }
        let grid = columns
            .iter()
            .find_map(|c| match &c.repr {
                Repr::Sampled { grid, .. } => Some(*grid),
                Repr::Analytic(_) => None,
            })
            .expect("at least one sampled column");
        let max_order = columns.iter().map(|c| c.max_order).min().unwrap_or(0);
        let width: usize = columns.iter().map(|c| c.cols).sum();
        let mut table = Vec::with_capacity(max_order + 1);
        for order in 0..=max_order {
            let mut samples = Vec::with_capacity(grid.count());
            for i in 0..grid.count() {
                let x = grid.x(i);
                let mut m = CMatrix::zeros(first.rows, width);
                let mut at = 0;
                for c in columns {
                    let block = c.eval_node(&grid, i, x, order)?;
                    m.view_mut((0, at), (c.rows, c.cols)).copy_from(&block);
                    at += c.cols;
                }
                samples.push(m);
            }
            table.push(samples);
        }
        let source = if columns.iter().any(|c| c.source == FunctionSource::Tabulated) {
            FunctionSource::Tabulated
        } else {
            FunctionSource::OdePropagated
        };
        Self::sampled(grid, table, source)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn source(&self) -> FunctionSource {
        self.source
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.repr, Repr::Analytic(_))
    }

    /// The grid a sampled function lives on.
    pub fn grid(&self) -> Option<&Grid> {
        match &self.repr {
            Repr::Sampled { grid, .. } => Some(grid),
            Repr::Analytic(_) => None,
        }
    }

    /// `d^order/dx^order` at `x`.
    pub fn eval(&self, x: f64, order: usize) -> Result<CMatrix> {
        if order > self.max_order {
            return Err(Error::DerivativeCapability {
                requested: order,
                available: self.max_order,
            });
        }
        match &self.repr {
            Repr::Analytic(columns) => {
                let mut m = CMatrix::zeros(self.rows, self.cols);
                for (j, col) in columns.iter().enumerate() {
                    for term in &col.terms {
                        let f = term.form.derivative(x, order);
                        for (r, c) in term.vector.iter().enumerate() {
                            m[(r, j)] += c * f;
                        }
                    }
                }
                Ok(m)
            }
            Repr::Sampled { grid, table } => {
                if !grid.contains(x) {
                    return Err(Error::Domain {
                        x,
                        x_min: grid.x_min(),
                        x_max: grid.x_max(),
                    });
                }
                let i = grid.locate(x).ok_or(Error::NotGridNode { x })?;
                Ok(table[order][i].clone())
            }
        }
    }

    /// Derivatives `0..=order` at `x`.
    pub fn jet(&self, x: f64, order: usize) -> Result<Vec<CMatrix>> {
        (0..=order).map(|m| self.eval(x, m)).collect()
    }

    /// Evaluation at node `i` of `grid`, skipping the node lookup when the
    /// function is sampled on the same grid.
    pub(crate) fn eval_node(&self, grid: &Grid, i: usize, x: f64, order: usize) -> Result<CMatrix> {
        match &self.repr {
            Repr::Sampled { grid: own, table } if own.same_nodes(grid) => {
                if order > self.max_order {
                    return Err(Error::DerivativeCapability {
                        requested: order,
                        available: self.max_order,
                    });
                }
                Ok(table[order][i].clone())
            }
            _ => self.eval(x, order),
        }
    }

    pub(crate) fn jet_node(&self, grid: &Grid, i: usize, order: usize) -> Result<Vec<CMatrix>> {
        let x = grid.x(i);
        (0..=order).map(|m| self.eval_node(grid, i, x, m)).collect()
    }

    /// Column `j` as a `rows × 1` function.
    pub fn column(&self, j: usize) -> Result<MatrixFunction> {
        if j >= self.cols {
            return Err(Error::IndexOutOfRange(format!("column {j} of {}", self.cols)));
        }
        match &self.repr {
            Repr::Analytic(columns) => Self::analytic(vec![columns[j].clone()]),
            Repr::Sampled { grid, table } => {
                let t = table
                    .iter()
                    .map(|s| s.iter().map(|m| m.columns(j, 1).into_owned()).collect())
                    .collect();
                Self::sampled(*grid, t, self.source)
            }
        }
    }
}
