//! Block Wronsky matrices of a set of matrix transformation functions and
//! their bordered variants.
//!
//! For `N` functions `𝒰_1 … 𝒰_N`, each `n × n`, the Wronsky matrix is the
//! `nN × nN` block matrix whose block `(r, k)` is `𝒰_k^{(r)}`,
//! `0 ≤ r ≤ N - 1`. All channel indices `i, j` below are zero-based.

use crate::error::{Error, Result};
use crate::grid_calculus::{Grid, MatrixFunction};
use crate::CMatrix;

/// One transformation function with its diagonal eigenvalue matrix,
/// `h₀𝒰 = 𝒰 diag(lambdas)`.
#[derive(Debug, Clone)]
pub struct Transformation {
    pub function: MatrixFunction,
    pub lambdas: Vec<f64>,
}

impl Transformation {
    pub fn new(function: MatrixFunction, lambdas: Vec<f64>) -> Self {
        Self { function, lambdas }
    }
}

/// Ordered list of transformation functions `𝒰_1 … 𝒰_N`.
#[derive(Debug, Clone)]
pub struct TransformationSet {
    n: usize,
    items: Vec<Transformation>,
}

impl TransformationSet {
    pub fn new(items: Vec<Transformation>) -> Result<Self> {
        let first = items.first().ok_or_else(|| Error::InvalidSet("the set is empty".into()))?;
        let n = first.function.rows();
        let mut grid: Option<Grid> = None;
        for (k, t) in items.iter().enumerate() {
            if t.function.rows() != n || t.function.cols() != n {
                return Err(Error::InvalidSet(format!(
                    "item {k} is {}x{}, expected {n}x{n}",
                    t.function.rows(),
                    t.function.cols()
                )));
            }
            if t.lambdas.len() != n {
                return Err(Error::InvalidSet(format!(
                    "item {k} has {} eigenvalues, expected {n}",
                    t.lambdas.len()
                )));
            }
            if let Some(g) = t.function.grid() {
                match grid {
                    Some(prev) if !prev.same_nodes(g) => {
                        return Err(Error::InvalidSet(format!("item {k} is sampled on a different grid")));
                    }
                    _ => grid = Some(*g),
                }
            }
            for (l, other) in items[..k].iter().enumerate() {
                if other.lambdas == t.lambdas {
                    return Err(Error::InvalidSet(format!(
                        "eigenvalue lists must be pairwise distinct: items {l} and {k} share {:?}",
                        t.lambdas
                    )));
                }
            }
        }
        Ok(Self { n, items })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Transformation] {
        &self.items
    }

    /// Smallest derivative capability among the items.
    pub fn max_order(&self) -> usize {
        self.items.iter().map(|t| t.function.max_order()).min().unwrap_or(0)
    }

    /// The same set reordered: item `m` of the result is `self.items[order[m]]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || order.iter().any(|&i| i >= self.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::IndexOutOfRange(format!("{order:?} is not a permutation of 0..{}", self.len())));
        }
        Self::new(order.iter().map(|&i| self.items[i].clone()).collect())
    }

    /// The first `len` items.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        Self::new(self.items[..len.min(self.len())].to_vec())
    }

    fn require_order(&self, order: usize) -> Result<()> {
        if self.max_order() < order {
            return Err(Error::DerivativeCapability {
                requested: order,
                available: self.max_order(),
            });
        }
        Ok(())
    }

    /// Derivative jets `0..=order` of every item at `x`.
    pub fn jets(&self, x: f64, order: usize) -> Result<Vec<Vec<CMatrix>>> {
        self.require_order(order)?;
        self.items.iter().map(|t| t.function.jet(x, order)).collect()
    }

    pub(crate) fn jets_node(&self, grid: &Grid, i: usize, order: usize) -> Result<Vec<Vec<CMatrix>>> {
        self.require_order(order)?;
        self.items.iter().map(|t| t.function.jet_node(grid, i, order)).collect()
    }
}

/// `nN × nN` block matrix with block `(r, k) = jets[k][r]`, `r < count`.
fn block_wronskian(n: usize, jets: &[Vec<CMatrix>], count: usize) -> CMatrix {
    let size = n * count;
    let mut w = CMatrix::zeros(size, size);
    for (k, jet) in jets.iter().take(count).enumerate() {
        for r in 0..count {
            w.view_mut((r * n, k * n), (n, n)).copy_from(&jet[r]);
        }
    }
    w
}

/// The Wronsky matrix at one point together with the jets needed to build its
/// bordered variants.
#[derive(Debug, Clone)]
pub struct WronskianBundle {
    x: f64,
    n: usize,
    jets: Vec<Vec<CMatrix>>,
    w: CMatrix,
}

impl WronskianBundle {
    /// Jets must reach order `N - 1` for `W`, order `N` for the state and
    /// row-replace variants.
    pub fn from_jets(x: f64, n: usize, jets: Vec<Vec<CMatrix>>) -> Result<Self> {
        let count = jets.len();
        if count == 0 {
            return Err(Error::InvalidSet("the set is empty".into()));
        }
        if jets.iter().any(|j| j.len() < count) {
            return Err(Error::DerivativeCapability {
                requested: count - 1,
                available: jets.iter().map(|j| j.len()).min().unwrap_or(1) - 1,
            });
        }
        let w = block_wronskian(n, &jets, count);
        Ok(Self { x, n, jets, w })
    }

    /// Bundle at `x` with jets to order `N` (or `N - 1` when that is all the
    /// set offers).
    pub fn at(set: &TransformationSet, x: f64) -> Result<Self> {
        let order = set.len().min(set.max_order());
        Self::from_jets(x, set.n(), set.jets(x, order)?)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn len(&self) -> usize {
        self.jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jets.is_empty()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.w
    }

    pub fn jets(&self) -> &[Vec<CMatrix>] {
        &self.jets
    }

    fn check_channel(&self, name: &str, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange(format!("{name} = {i} for n = {}", self.n)));
        }
        Ok(())
    }

    fn top_order_available(&self) -> Result<()> {
        let big_n = self.len();
        if self.jets.iter().any(|j| j.len() <= big_n) {
            return Err(Error::DerivativeCapability {
                requested: big_n,
                available: big_n - 1,
            });
        }
        Ok(())
    }

    /// `W(𝒰_1 … 𝒰_{N-1})`, the leading block.
    pub fn leading(&self) -> CMatrix {
        let big_n = self.len();
        block_wronskian(self.n, &self.jets[..big_n - 1], big_n - 1)
    }

    /// `W_{jE}`: `W` bordered on the right by `Ψ, Ψ', …, Ψ^{(N-1)}` and below
    /// by row `j` of every `𝒰_k^{(N)}`, with corner `ψ_j^{(N)}`. Size `nN + 1`.
    pub fn state_matrix(&self, j: usize, psi: &[CMatrix]) -> Result<CMatrix> {
        self.check_channel("j", j)?;
        self.top_order_available()?;
        let (n, big_n) = (self.n, self.len());
        if psi.len() <= big_n {
            return Err(Error::DerivativeCapability {
                requested: big_n,
                available: psi.len().saturating_sub(1),
            });
        }
        if psi.iter().any(|p| p.shape() != (n, 1)) {
            return Err(Error::DimensionMismatch(format!("state jets must be {n}x1")));
        }
        let size = n * big_n;
        let mut m = CMatrix::zeros(size + 1, size + 1);
        m.view_mut((0, 0), (size, size)).copy_from(&self.w);
        for r in 0..big_n {
            m.view_mut((r * n, size), (n, 1)).copy_from(&psi[r]);
        }
        for (k, jet) in self.jets.iter().enumerate() {
            m.view_mut((size, k * n), (1, n)).copy_from(&jet[big_n].row(j));
        }
        m[(size, size)] = psi[big_n][(j, 0)];
        Ok(m)
    }

    /// `W_j^i`: `W(𝒰_1 … 𝒰_{N-1})` bordered on the right by column `i` of
    /// `𝒰_N, …, 𝒰_N^{(N-2)}` and below by row `j` of `𝒰_k^{(N-1)}`,
    /// `k < N`, with corner `u_{j,i;N}^{(N-1)}`. Size `n(N-1) + 1`.
    ///
    /// Its determinant is the embordering minor of the leading block in `W`
    /// with bordering row `j` and bordering column `i`.
    pub fn column_matrix(&self, i: usize, j: usize) -> Result<CMatrix> {
        self.check_channel("i", i)?;
        self.check_channel("j", j)?;
        let (n, big_n) = (self.n, self.len());
        if big_n < 2 {
            return Err(Error::Precondition("the column variant needs N >= 2".into()));
        }
        let p = n * (big_n - 1);
        let last = &self.jets[big_n - 1];
        let mut m = CMatrix::zeros(p + 1, p + 1);
        m.view_mut((0, 0), (p, p)).copy_from(&self.leading());
        for r in 0..big_n - 1 {
            m.view_mut((r * n, p), (n, 1)).copy_from(&last[r].column(i));
        }
        for (k, jet) in self.jets[..big_n - 1].iter().enumerate() {
            m.view_mut((p, k * n), (1, n)).copy_from(&jet[big_n - 1].row(j));
        }
        m[(p, p)] = last[big_n - 1][(j, i)];
        Ok(m)
    }

    /// `W_{i,j}`: `W` with its last block row `𝒰_k^{(N-1)}` replaced by
    /// `𝒰_k^{ij}`, which is `𝒰_k^{(N-1)}` with row `j` replaced by row `i` of
    /// `𝒰_k^{(N)}`. Size `nN`.
    pub fn row_replace_matrix(&self, i: usize, j: usize) -> Result<CMatrix> {
        self.check_channel("i", i)?;
        self.check_channel("j", j)?;
        self.top_order_available()?;
        let (n, big_n) = (self.n, self.len());
        let mut m = self.w.clone();
        let row = n * (big_n - 1) + j;
        for (k, jet) in self.jets.iter().enumerate() {
            m.view_mut((row, k * n), (1, n)).copy_from(&jet[big_n].row(i));
        }
        Ok(m)
    }
}

/// `W(𝒰_1 … 𝒰_N)` at `x`.
pub fn wronskian_matrix(set: &TransformationSet, x: f64) -> Result<CMatrix> {
    let order = set.len() - 1;
    Ok(WronskianBundle::from_jets(x, set.n(), set.jets(x, order)?)?.w)
}

/// Which bordered variant [`bordered_matrix`] assembles.
#[derive(Debug, Clone, Copy)]
pub enum BorderVariant<'a> {
    /// `W_{jE}` for the state `psi` (an `n × 1` function).
    State { j: usize, psi: &'a MatrixFunction },
    /// `W_j^i` over the first `N - 1` functions.
    Column { i: usize, j: usize },
    /// `W_{i,j}`.
    RowReplace { i: usize, j: usize },
}

pub fn bordered_matrix(set: &TransformationSet, variant: BorderVariant<'_>, x: f64) -> Result<CMatrix> {
    let big_n = set.len();
    match variant {
        BorderVariant::State { j, psi } => {
            let bundle = WronskianBundle::from_jets(x, set.n(), set.jets(x, big_n)?)?;
            if psi.max_order() < big_n {
                return Err(Error::DerivativeCapability {
                    requested: big_n,
                    available: psi.max_order(),
                });
            }
            bundle.state_matrix(j, &psi.jet(x, big_n)?)
        }
        BorderVariant::Column { i, j } => {
            WronskianBundle::from_jets(x, set.n(), set.jets(x, big_n - 1)?)?.column_matrix(i, j)
        }
        BorderVariant::RowReplace { i, j } => {
            WronskianBundle::from_jets(x, set.n(), set.jets(x, big_n)?)?.row_replace_matrix(i, j)
        }
    }
}
