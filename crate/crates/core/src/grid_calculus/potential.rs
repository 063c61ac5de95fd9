use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fd::masked_derivative;
use super::{solve_matrix_schrodinger, Grid, MatrixFunction, ScalarForm};
use crate::error::{Error, Result};
use crate::{hermiticity_deviation, CMatrix};

/// `coef · form(x)`, one term of an analytic potential entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialTerm {
    #[serde(default = "one")]
    pub coef: f64,
    #[serde(flatten)]
    pub form: ScalarForm,
}

fn one() -> f64 {
    1.0
}

impl PotentialTerm {
    pub fn new(coef: f64, form: ScalarForm) -> Self {
        Self { coef, form }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Zero,
    DiagonalAnalytic,
    CoupledAnalytic,
    Tabulated,
}

#[derive(Debug, Clone)]
enum Repr {
    Zero,
    /// Full `n × n` table of real entries; symmetric by construction.
    Analytic(Vec<Vec<Vec<PotentialTerm>>>),
    /// `table[order][node]`
    Tabulated { grid: Grid, table: Vec<Vec<CMatrix>> },
}

/// The initial potential `V₀(x)`, an `n × n` matrix.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    n: usize,
    kind: PotentialKind,
    deriv_capability: usize,
    repr: Repr,
}

/// Tabulated inputs may deviate from Hermiticity by this much before a
/// warning is logged.
const TABULATED_HERMITIAN_TOL: f64 = 1e-12;

impl PotentialSpec {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            kind: PotentialKind::Zero,
            deriv_capability: usize::MAX,
            repr: Repr::Zero,
        }
    }

    /// `diag(v_1(x), …, v_n(x))` with each entry a sum of real terms.
    pub fn diagonal(entries: Vec<Vec<PotentialTerm>>) -> Result<Self> {
        let n = entries.len();
        let mut table = vec![vec![Vec::new(); n]; n];
        for (i, e) in entries.into_iter().enumerate() {
            check_real(&e, i, i)?;
            table[i][i] = e;
        }
        Ok(Self {
            n,
            kind: PotentialKind::DiagonalAnalytic,
            deriv_capability: usize::MAX,
            repr: Repr::Analytic(table),
        })
    }

    /// Real symmetric coupled potential. Each `(i, j, terms)` sets both
    /// `V_ij` and `V_ji`; unspecified entries are zero.
    pub fn coupled(n: usize, entries: Vec<(usize, usize, Vec<PotentialTerm>)>) -> Result<Self> {
        let mut table = vec![vec![Vec::new(); n]; n];
        for (i, j, e) in entries {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange(format!("potential entry ({i}, {j}) for n = {n}")));
            }
            check_real(&e, i, j)?;
            table[i][j] = e.clone();
            table[j][i] = e;
        }
        Ok(Self {
            n,
            kind: PotentialKind::CoupledAnalytic,
            deriv_capability: usize::MAX,
            repr: Repr::Analytic(table),
        })
    }

    /// Potential sampled on `grid`. Derivatives up to `deriv_capability` come
    /// from repeated 4th-order differencing, which loses accuracy with each
    /// order. Non-Hermitian input is accepted with a logged warning.
    pub fn tabulated(grid: Grid, values: Vec<CMatrix>, deriv_capability: usize) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::LengthMismatch {
                expected: grid.count(),
                actual: values.len(),
            });
        }
        let n = values[0].nrows();
        if values.iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::DimensionMismatch("tabulated potential samples must be n x n".into()));
        }
        let dev = values.iter().map(hermiticity_deviation).fold(0.0, f64::max);
        if dev > TABULATED_HERMITIAN_TOL {
            log::warn!("tabulated potential is not Hermitian: max |V - V†| = {dev:.3e}");
        }
        let mut table = vec![values];
        for _ in 0..deriv_capability {
            let prev: Vec<Option<CMatrix>> = table.last().unwrap().iter().cloned().map(Some).collect();
            let next = masked_derivative(&prev, &grid)?
                .into_iter()
                .map(|m| m.expect("unmasked input"))
                .collect();
            table.push(next);
        }
        Ok(Self {
            n,
            kind: PotentialKind::Tabulated,
            deriv_capability,
            repr: Repr::Tabulated { grid, table },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn deriv_capability(&self) -> usize {
        self.deriv_capability
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// `V₀^{(order)}(x)`.
    pub fn eval(&self, x: f64, order: usize) -> Result<CMatrix> {
        if order > self.deriv_capability {
            return Err(Error::DerivativeCapability {
                requested: order,
                available: self.deriv_capability,
            });
        }
        match &self.repr {
            Repr::Zero => Ok(CMatrix::zeros(self.n, self.n)),
            Repr::Analytic(table) => {
                let mut m = CMatrix::zeros(self.n, self.n);
                for (i, row) in table.iter().enumerate() {
                    for (j, terms) in row.iter().enumerate() {
                        let v: f64 = terms.iter().map(|t| t.coef * t.form.derivative(x, order).re).sum();
                        m[(i, j)] = Complex64::new(v, 0.0);
                    }
                }
                Ok(m)
            }
            Repr::Tabulated { grid, table } => {
                if !grid.contains(x) {
                    return Err(Error::Domain {
                        x,
                        x_min: grid.x_min(),
                        x_max: grid.x_max(),
                    });
                }
                Ok(interpolate(grid, &table[order], x))
            }
        }
    }
}

fn check_real(terms: &[PotentialTerm], i: usize, j: usize) -> Result<()> {
    if terms.iter().any(|t| !t.form.is_real() || !t.coef.is_finite()) {
        return Err(Error::Precondition(format!(
            "analytic potential entry ({i}, {j}) must be real-valued"
        )));
    }
    Ok(())
}

/// Cubic Lagrange interpolation through the four nodes around `x`; exact at
/// nodes.
fn interpolate(grid: &Grid, samples: &[CMatrix], x: f64) -> CMatrix {
    if let Some(i) = grid.locate(x) {
        return samples[i].clone();
    }
    let h = grid.spacing();
    let t = (x - grid.x_min()) / h;
    let base = (t.floor() as isize - 1).clamp(0, grid.count() as isize - 4) as usize;
    let mut out = CMatrix::zeros(samples[0].nrows(), samples[0].ncols());
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (t - (base + b) as f64) / (a as f64 - b as f64);
            }
        }
        out += &samples[base + a] * Complex64::new(w, 0.0);
    }
    out
}

/// `V₀^{(order)}(x)` for any potential kind.
pub fn eval_potential(spec: &PotentialSpec, x: f64, order: usize) -> Result<CMatrix> {
    spec.eval(x, order)
}

/// Where an initial state comes from.
#[derive(Debug, Clone)]
pub enum StateSource {
    /// Closed form (an `n × 1` analytic function).
    Analytic(MatrixFunction),
    /// `Ψ(x_min)` and `Ψ'(x_min)`, propagated by the ODE solver.
    Boundary { value: Vec<Complex64>, deriv: Vec<Complex64> },
}

/// An eigenstate `Ψ_E` of the initial Hamiltonian.
#[derive(Debug, Clone)]
pub struct StateSpec {
    pub energy: f64,
    pub source: StateSource,
}

impl StateSpec {
    pub fn analytic(energy: f64, function: MatrixFunction) -> Self {
        Self {
            energy,
            source: StateSource::Analytic(function),
        }
    }

    pub fn boundary(energy: f64, value: Vec<Complex64>, deriv: Vec<Complex64>) -> Self {
        Self {
            energy,
            source: StateSource::Boundary { value, deriv },
        }
    }

    /// The state as an `n × 1` function with derivatives to at least `order`.
    pub fn resolve(&self, potential: &PotentialSpec, grid: &Grid, order: usize) -> Result<MatrixFunction> {
        match &self.source {
            StateSource::Analytic(f) => {
                if f.cols() != 1 || f.rows() != potential.n() {
                    return Err(Error::DimensionMismatch(format!(
                        "state must be {}x1, got {}x{}",
                        potential.n(),
                        f.rows(),
                        f.cols()
                    )));
                }
                Ok(f.clone())
            }
            StateSource::Boundary { value, deriv } => {
                Ok(solve_matrix_schrodinger(potential, self.energy, value, deriv, grid, order)?.into_function())
            }
        }
    }
}
