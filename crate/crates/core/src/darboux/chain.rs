//! The two chain engines.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jet::{apply_jet, log_derivative_jet};
use super::operator::potential_shift;
use super::DEGENERATE_FRACTION;
use crate::detkit::{det, is_numerically_singular};
use crate::error::{Error, Result};
use crate::grid_calculus::{Grid, MatrixFunction, PotentialSpec, SampledMatrix, StateSpec};
use crate::wronskian::{TransformationSet, WronskianBundle};
use crate::{hermiticity_deviation, max_abs, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Stepwise,
    ClosedForm,
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Stepwise => "stepwise",
            Engine::ClosedForm => "closed-form",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct ChainDiagnostics {
    /// Per step, `max ‖Y_k' - F_k Y_k‖ / max(1, ‖Y_k'‖)` over unmasked nodes.
    /// Empty for the closed form.
    pub annihilation: Vec<f64>,
    /// `max ‖V_N - V_N†‖` over unmasked nodes.
    pub hermiticity_deviation: f64,
}

/// Output of either engine. Masked nodes are `None` in every sampled field.
#[derive(Debug, Clone)]
pub struct ChainResult {
    engine: Engine,
    potential: SampledMatrix,
    superpotential: SampledMatrix,
    states: Vec<SampledMatrix>,
    energies: Vec<f64>,
    intermediates: Vec<SampledMatrix>,
    wronskian: Vec<Option<Complex64>>,
    singular_points: Vec<usize>,
    diagnostics: ChainDiagnostics,
}

impl ChainResult {
    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn grid(&self) -> &Grid {
        self.potential.grid()
    }

    /// `V_N`.
    pub fn potential(&self) -> &SampledMatrix {
        &self.potential
    }

    /// `F_N`.
    pub fn superpotential(&self) -> &SampledMatrix {
        &self.superpotential
    }

    /// Transformed states `Φ_E` as `n × 1` samples, in input order.
    pub fn states(&self) -> &[SampledMatrix] {
        &self.states
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `Y_1 … Y_N` (stepwise engine only; `Y_1 = 𝒰_1`).
    pub fn intermediates(&self) -> &[SampledMatrix] {
        &self.intermediates
    }

    /// `|W(𝒰_1 … 𝒰_N)|` per node. The stepwise engine reports `Π_k |Y_k|`.
    pub fn wronskian(&self) -> &[Option<Complex64>] {
        &self.wronskian
    }

    /// Nodes where `F_N` is undefined.
    pub fn singular_points(&self) -> &[usize] {
        &self.singular_points
    }

    pub fn diagnostics(&self) -> &ChainDiagnostics {
        &self.diagnostics
    }
}

struct Prepared {
    big_n: usize,
    states: Vec<MatrixFunction>,
    energies: Vec<f64>,
}

fn prepare(v0: &PotentialSpec, set: &TransformationSet, states: &[StateSpec], grid: &Grid) -> Result<Prepared> {
    if set.n() != v0.n() {
        return Err(Error::DimensionMismatch(format!(
            "transformation functions are {0}x{0} but the potential is {1}x{1}",
            set.n(),
            v0.n()
        )));
    }
    let big_n = set.len();
    if set.max_order() < big_n {
        return Err(Error::DerivativeCapability {
            requested: big_n,
            available: set.max_order(),
        });
    }
    for t in set.items() {
        if let Some(g) = t.function.grid() {
            if !g.same_nodes(grid) {
                return Err(Error::InvalidSet("sampled transformation functions must live on the run grid".into()));
            }
        }
    }
    let resolved = states
        .iter()
        .map(|s| {
            let f = s.resolve(v0, grid, big_n)?;
            if f.max_order() < big_n {
                return Err(Error::DerivativeCapability {
                    requested: big_n,
                    available: f.max_order(),
                });
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        big_n,
        states: resolved,
        energies: states.iter().map(|s| s.energy).collect(),
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    engine: Engine,
    v0: &PotentialSpec,
    grid: &Grid,
    f: Vec<Option<CMatrix>>,
    states: Vec<Vec<Option<CMatrix>>>,
    energies: Vec<f64>,
    intermediates: Vec<SampledMatrix>,
    wronskian: Vec<Option<Complex64>>,
    annihilation: Vec<f64>,
) -> Result<ChainResult> {
    let superpotential = SampledMatrix::new(*grid, f)?;
    let potential = potential_shift(v0, &superpotential.derivative())?;
    let hermiticity = potential
        .values()
        .iter()
        .flatten()
        .map(hermiticity_deviation)
        .fold(0.0, f64::max);
    let states = states
        .into_iter()
        .map(|s| SampledMatrix::new(*grid, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainResult {
        engine,
        singular_points: superpotential.masked_indices(),
        potential,
        superpotential,
        states,
        energies,
        intermediates,
        wronskian,
        diagnostics: ChainDiagnostics {
            annihilation,
            hermiticity_deviation: hermiticity,
        },
    })
}

/// Per-node output of the stepwise engine.
struct StepNode {
    f: Option<CMatrix>,
    states: Vec<Option<CMatrix>>,
    ys: Vec<Option<CMatrix>>,
    annihilation: Vec<f64>,
    failed_step: Option<usize>,
    wronskian: Option<Complex64>,
}

fn stepwise_node(set: &TransformationSet, states: &[MatrixFunction], grid: &Grid, i: usize, big_n: usize) -> Result<StepNode> {
    let n = set.n();
    let mut items = set.jets_node(grid, i, big_n)?;
    let mut psi = states
        .iter()
        .map(|s| s.jet_node(grid, i, big_n))
        .collect::<Result<Vec<_>>>()?;
    let mut out = StepNode {
        f: None,
        states: vec![None; states.len()],
        ys: vec![None; big_n],
        annihilation: vec![0.0; big_n],
        failed_step: None,
        wronskian: None,
    };
    let mut total = CMatrix::zeros(n, n);
    let mut wdet = Complex64::new(1.0, 0.0);
    for k in 0..big_n {
        // items[k] holds Y_{k+1} with derivatives to order big_n - k.
        let order = big_n - k;
        let y = std::mem::take(&mut items[k]);
        out.ys[k] = Some(y[0].clone());
        wdet *= det(&y[0]);
        let Some(f) = log_derivative_jet(&y, order - 1) else {
            out.failed_step = Some(k);
            return Ok(out);
        };
        out.annihilation[k] = max_abs(&apply_jet(&f, &y, 0)[0]) / max_abs(&y[1]).max(1.0);
        total += &f[0];
        for later in &mut items[k + 1..] {
            *later = apply_jet(&f, later, order - 1);
        }
        for p in &mut psi {
            *p = apply_jet(&f, p, order - 1);
        }
    }
    out.f = Some(total);
    out.states = psi.into_iter().map(|mut p| Some(p.swap_remove(0))).collect();
    out.wronskian = Some(wdet);
    Ok(out)
}

/// Applies `L_k = D - Y_k'Y_k⁻¹` one step at a time, with
/// `Y_k = L_{k-1} ⋯ L_1 𝒰_k` and `F_N = Σ_k Y_k'Y_k⁻¹`.
///
/// Derivative jets of every remaining transformation function and state are
/// carried through each step exactly, node by node.
pub fn chain_stepwise(v0: &PotentialSpec, set: &TransformationSet, states: &[StateSpec], grid: &Grid) -> Result<ChainResult> {
    let prep = prepare(v0, set, states, grid)?;
    let big_n = prep.big_n;
    let nodes = (0..grid.count())
        .into_par_iter()
        .map(|i| stepwise_node(set, &prep.states, grid, i, big_n))
        .collect::<Result<Vec<_>>>()?;

    for k in 0..big_n {
        let failed = nodes.iter().filter(|node| node.failed_step == Some(k)).count();
        let fraction = failed as f64 / grid.count() as f64;
        if fraction > DEGENERATE_FRACTION {
            return Err(Error::DegenerateChain {
                step: k + 1,
                fraction: 100.0 * fraction,
            });
        }
    }

    let mut annihilation = vec![0.0_f64; big_n];
    for node in &nodes {
        for (acc, a) in annihilation.iter_mut().zip(&node.annihilation) {
            *acc = acc.max(*a);
        }
    }
    let intermediates = (0..big_n)
        .map(|k| SampledMatrix::new(*grid, nodes.iter().map(|node| node.ys[k].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    let wronskian = nodes.iter().map(|node| node.wronskian).collect();
    let state_samples = (0..prep.states.len())
        .map(|s| nodes.iter().map(|node| node.states[s].clone()).collect())
        .collect();
    let f = nodes.into_iter().map(|node| node.f).collect();
    finish(
        Engine::Stepwise,
        v0,
        grid,
        f,
        state_samples,
        prep.energies,
        intermediates,
        wronskian,
        annihilation,
    )
}

struct ClosedNode {
    f: Option<CMatrix>,
    states: Vec<Option<CMatrix>>,
    wronskian: Complex64,
}

fn closed_form_node(set: &TransformationSet, states: &[MatrixFunction], grid: &Grid, i: usize, big_n: usize) -> Result<ClosedNode> {
    let n = set.n();
    let bundle = WronskianBundle::from_jets(grid.x(i), n, set.jets_node(grid, i, big_n)?)?;
    let w = det(bundle.matrix());
    if is_numerically_singular(bundle.matrix(), w) {
        return Ok(ClosedNode {
            f: None,
            states: vec![None; states.len()],
            wronskian: w,
        });
    }
    let mut f = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            f[(r, c)] = det(&bundle.row_replace_matrix(r, c)?) / w;
        }
    }
    let phis = states
        .iter()
        .map(|s| {
            let psi = s.jet_node(grid, i, big_n)?;
            let mut phi = CMatrix::zeros(n, 1);
            for j in 0..n {
                phi[(j, 0)] = det(&bundle.state_matrix(j, &psi)?) / w;
            }
            Ok(Some(phi))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosedNode {
        f: Some(f),
        states: phis,
        wronskian: w,
    })
}

/// Evaluates `f_ij = |W_{i,j}|/|W|` and `φ_j = |W_{jE}|/|W|` independently at
/// every node; `V_N = V₀ - 2F_N'` by fourth-order differences.
pub fn closed_form_chain(v0: &PotentialSpec, set: &TransformationSet, states: &[StateSpec], grid: &Grid) -> Result<ChainResult> {
    let prep = prepare(v0, set, states, grid)?;
    let nodes = (0..grid.count())
        .into_par_iter()
        .map(|i| closed_form_node(set, &prep.states, grid, i, prep.big_n))
        .collect::<Result<Vec<_>>>()?;
    if nodes.iter().all(|node| node.f.is_none()) {
        return Err(Error::DegenerateSet);
    }
    let masked = nodes.iter().filter(|node| node.f.is_none()).count();
    if masked > 0 {
        log::warn!("Wronskian numerically singular at {masked} grid points");
    }
    let wronskian = nodes.iter().map(|node| Some(node.wronskian)).collect();
    let state_samples = (0..prep.states.len())
        .map(|s| nodes.iter().map(|node| node.states[s].clone()).collect())
        .collect();
    let f = nodes.into_iter().map(|node| node.f).collect();
    finish(
        Engine::ClosedForm,
        v0,
        grid,
        f,
        state_samples,
        prep.energies,
        Vec::new(),
        wronskian,
        Vec::new(),
    )
}

/// `Y_N` from bordered determinants together with the two evaluations of its
/// determinant.
#[derive(Debug, Clone)]
pub struct YMatrix {
    /// `y_{j,i} = |W_j^i| / |W(𝒰_1 … 𝒰_{N-1})|`.
    pub entries: CMatrix,
    /// `det(entries)`.
    pub det_entries: Complex64,
    /// `|W(𝒰_1 … 𝒰_N)| / |W(𝒰_1 … 𝒰_{N-1})|`.
    pub ratio: Complex64,
}

impl YMatrix {
    /// `|det_entries - ratio| / max(1, |ratio|)`.
    pub fn relative_residual(&self) -> f64 {
        (self.det_entries - self.ratio).norm() / self.ratio.norm().max(1.0)
    }
}

pub fn y_matrix_closed_form(set: &TransformationSet, x: f64) -> Result<YMatrix> {
    let big_n = set.len();
    if big_n < 2 {
        return Err(Error::Precondition("Y_N from bordered determinants needs N >= 2".into()));
    }
    let bundle = WronskianBundle::from_jets(x, set.n(), set.jets(x, big_n - 1)?)?;
    let leading = bundle.leading();
    let den = det(&leading);
    if is_numerically_singular(&leading, den) {
        return Err(Error::Masked { x });
    }
    let n = set.n();
    let mut entries = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            entries[(j, i)] = det(&bundle.column_matrix(i, j)?) / den;
        }
    }
    Ok(YMatrix {
        det_entries: det(&entries),
        ratio: det(bundle.matrix()) / den,
        entries,
    })
}
