//! Run configuration: a JSON document deserialized into [`RunConfig`] and
//! turned into core types by [`RunConfig::build`].
//!
//! Complex numbers are written either as a plain number or as `[re, im]`.

use std::path::{Path, PathBuf};

use darboux_core::darboux::Engine;
use darboux_core::grid_calculus::{
    solve_matrix_schrodinger, AnalyticColumn, BasisTerm, Grid, MatrixFunction, PotentialSpec, PotentialTerm,
    ScalarForm, StateSpec,
};
use darboux_core::verify::{ENGINE_TOL, OPERATOR_TOL, RATIO_TOL};
use darboux_core::wronskian::{Transformation, TransformationSet};
use darboux_core::CMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::CliError;

/// A complex number in a config file.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum CNumber {
    Real(f64),
    Pair([f64; 2]),
}

impl From<CNumber> for Complex64 {
    fn from(c: CNumber) -> Self {
        match c {
            CNumber::Real(re) => Complex64::new(re, 0.0),
            CNumber::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn complex(v: &[CNumber]) -> Vec<Complex64> {
    v.iter().copied().map(Complex64::from).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
}

/// One entry of a coupled potential; the mirrored entry is filled in.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledEntry {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<PotentialTerm>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialConfig {
    Zero,
    /// Per-channel terms on the diagonal.
    Diagonal { entries: Vec<Vec<PotentialTerm>> },
    Coupled { entries: Vec<CoupledEntry> },
    /// CSV in the layout of `potential.csv`, relative to the config file.
    Tabulated {
        path: PathBuf,
        #[serde(default = "default_capability")]
        deriv_capability: usize,
    },
}

fn default_capability() -> usize {
    2
}

/// `form` fields of a scalar form plus the vector it multiplies.
#[derive(Debug, Clone, Deserialize)]
pub struct TermConfig {
    #[serde(flatten)]
    pub form: ScalarForm,
    pub vector: Vec<CNumber>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeInit {
    pub value: Vec<CNumber>,
    pub deriv: Vec<CNumber>,
}

/// A column is either a sum of analytic terms or ODE initial data at
/// `x_min`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnConfig {
    pub terms: Option<Vec<TermConfig>>,
    pub ode: Option<OdeInit>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformationConfig {
    pub lambdas: Vec<f64>,
    pub columns: Vec<ColumnConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub energy: f64,
    pub terms: Option<Vec<TermConfig>>,
    pub value: Option<Vec<CNumber>>,
    pub deriv: Option<Vec<CNumber>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineChoice {
    Stepwise,
    ClosedForm,
    Both,
}

impl EngineChoice {
    pub fn engines(self) -> Vec<Engine> {
        match self {
            EngineChoice::Stepwise => vec![Engine::Stepwise],
            EngineChoice::ClosedForm => vec![Engine::ClosedForm],
            EngineChoice::Both => vec![Engine::Stepwise, Engine::ClosedForm],
        }
    }
}

/// Check thresholds; every field is optional in the config.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Schrödinger residual of transformation columns.
    pub ode: f64,
    /// Transformed-state Schrödinger residual, intertwining, factorization.
    pub operator: f64,
    /// Engine equivalence.
    pub engine: f64,
    /// `|Y_N|` ratio, annihilation, permutation invariance.
    pub ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode: 1e-8,
            operator: OPERATOR_TOL,
            engine: ENGINE_TOL,
            ratio: RATIO_TOL,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub channels: usize,
    pub potential: PotentialConfig,
    pub transformations: Vec<TransformationConfig>,
    #[serde(default)]
    pub states: Vec<StateConfig>,
    #[serde(default = "default_engine")]
    pub engine: EngineChoice,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Probe functions for the operator identities; trigonometric columns
    /// when absent.
    pub probes: Option<Vec<Vec<TermConfig>>>,
}

fn default_engine() -> EngineChoice {
    EngineChoice::Both
}

/// Core objects built from a config.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: Grid,
    pub potential: PotentialSpec,
    pub set: TransformationSet,
    pub states: Vec<StateSpec>,
    pub probes: Vec<MatrixFunction>,
    /// Schrödinger residual of every transformation column, in set order.
    pub column_residuals: Vec<Vec<f64>>,
}

fn field(name: impl Into<String>, message: impl std::fmt::Display) -> CliError {
    CliError::Config {
        field: name.into(),
        message: message.to_string(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            field(if path == "." { "config".to_string() } else { path }, e.into_inner())
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    /// Builds the core problem. Relative table paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Problem, CliError> {
        let n = self.channels;
        if n == 0 {
            return Err(field("channels", "must be at least 1"));
        }
        let grid = Grid::new(self.grid.x_min, self.grid.x_max, self.grid.count).map_err(|e| field("grid", e))?;
        let potential = self.build_potential(&grid, base)?;
        if self.transformations.is_empty() {
            return Err(field("transformations", "at least one transformation is required"));
        }
        let big_n = self.transformations.len();
        // Order N for the Wronskians, 3 for the operator probes.
        let ode_order = big_n.max(3).min(potential.deriv_capability().saturating_add(2)).max(big_n);

        let mut items = Vec::with_capacity(big_n);
        let mut column_residuals = Vec::with_capacity(big_n);
        for (k, t) in self.transformations.iter().enumerate() {
            let at = format!("transformations[{k}]");
            if t.lambdas.len() != n {
                return Err(field(format!("{at}.lambdas"), format!("expected {n} eigenvalues, got {}", t.lambdas.len())));
            }
            if t.columns.len() != n {
                return Err(field(format!("{at}.columns"), format!("expected {n} columns, got {}", t.columns.len())));
            }
            let mut columns = Vec::with_capacity(n);
            let mut residuals = Vec::with_capacity(n);
            for (j, col) in t.columns.iter().enumerate() {
                let here = format!("{at}.columns[{j}]");
                let lambda = t.lambdas[j];
                let f = match (&col.terms, &col.ode) {
                    (Some(terms), None) => analytic_column(terms, n, &here)?,
                    (None, Some(init)) => {
                        check_len(&init.value, n, &format!("{here}.ode.value"))?;
                        check_len(&init.deriv, n, &format!("{here}.ode.deriv"))?;
                        solve_matrix_schrodinger(&potential, lambda, &complex(&init.value), &complex(&init.deriv), &grid, ode_order)
                            .map_err(|e| field(&here, e))?
                            .into_function()
                    }
                    _ => return Err(field(here, "give exactly one of `terms` or `ode`")),
                };
                residuals.push(column_residual(&f, &potential, lambda, &grid).map_err(|e| field(format!("{at}.columns[{j}]"), e))?);
                columns.push(f);
            }
            let function = MatrixFunction::from_columns(&columns).map_err(|e| field(format!("{at}.columns"), e))?;
            items.push(Transformation::new(function, t.lambdas.clone()));
            column_residuals.push(residuals);
        }
        let set = TransformationSet::new(items).map_err(|e| field("transformations", e))?;

        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(s, st)| {
                let here = format!("states[{s}]");
                match (&st.terms, &st.value, &st.deriv) {
                    (Some(terms), None, None) => Ok(StateSpec::analytic(st.energy, analytic_column(terms, n, &here)?)),
                    (None, Some(value), Some(deriv)) => {
                        check_len(value, n, &format!("{here}.value"))?;
                        check_len(deriv, n, &format!("{here}.deriv"))?;
                        Ok(StateSpec::boundary(st.energy, complex(value), complex(deriv)))
                    }
                    _ => Err(field(here, "give either `terms` or both `value` and `deriv`")),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;

        let probes = match &self.probes {
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(p, terms)| analytic_column(terms, n, &format!("probes[{p}]")))
                .collect::<Result<Vec<_>, _>>()?,
            None => default_probes(n),
        };

        Ok(Problem {
            grid,
            potential,
            set,
            states,
            probes,
            column_residuals,
        })
    }

    fn build_potential(&self, grid: &Grid, base: &Path) -> Result<PotentialSpec, CliError> {
        let n = self.channels;
        let spec = match &self.potential {
            PotentialConfig::Zero => PotentialSpec::zero(n),
            PotentialConfig::Diagonal { entries } => {
                if entries.len() != n {
                    return Err(field("potential.entries", format!("expected {n} diagonal entries, got {}", entries.len())));
                }
                PotentialSpec::diagonal(entries.clone()).map_err(|e| field("potential.entries", e))?
            }
            PotentialConfig::Coupled { entries } => PotentialSpec::coupled(
                n,
                entries.iter().map(|e| (e.row, e.col, e.terms.clone())).collect(),
            )
            .map_err(|e| field("potential.entries", e))?,
            PotentialConfig::Tabulated { path, deriv_capability } => {
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                let values = crate::output::read_matrix_csv(&full, n).map_err(|e| field("potential.path", e))?;
                PotentialSpec::tabulated(*grid, values, *deriv_capability).map_err(|e| field("potential", e))?
            }
        };
        Ok(spec)
    }
}

fn check_len(v: &[CNumber], n: usize, name: &str) -> Result<(), CliError> {
    if v.len() != n {
        return Err(field(name, format!("expected {n} components, got {}", v.len())));
    }
    Ok(())
}

fn analytic_column(terms: &[TermConfig], n: usize, name: &str) -> Result<MatrixFunction, CliError> {
    if terms.is_empty() {
        return Err(field(format!("{name}.terms"), "at least one term is required"));
    }
    let mut out = Vec::with_capacity(terms.len());
    for (t, term) in terms.iter().enumerate() {
        check_len(&term.vector, n, &format!("{name}.terms[{t}].vector"))?;
        out.push(BasisTerm {
            form: term.form.clone(),
            vector: complex(&term.vector),
        });
    }
    MatrixFunction::analytic(vec![AnalyticColumn { terms: out }]).map_err(|e| field(name, e))
}

/// `max ‖-U'' + V₀U - λU‖ / max(1, ‖U‖)` over the grid.
fn column_residual(f: &MatrixFunction, v0: &PotentialSpec, lambda: f64, grid: &Grid) -> darboux_core::Result<f64> {
    if f.max_order() < 2 {
        return Ok(0.0);
    }
    let mut worst = 0.0_f64;
    for x in grid.points() {
        let u = f.eval(x, 0)?;
        let r: CMatrix = -f.eval(x, 2)? + v0.eval(x, 0)? * &u - &u * Complex64::new(lambda, 0.0);
        worst = worst.max(darboux_core::max_abs(&r) / darboux_core::max_abs(&u).max(1.0));
    }
    Ok(worst)
}

/// `cos(1.3x)` and `sin(0.7x)` with fixed mixing vectors.
fn default_probes(n: usize) -> Vec<MatrixFunction> {
    let a: Vec<Complex64> = (0..n).map(|j| Complex64::new(1.0 / (j + 1) as f64, 0.0)).collect();
    let b: Vec<Complex64> = (0..n).map(|j| Complex64::new(if j % 2 == 0 { 0.5 } else { -1.0 }, 0.0)).collect();
    vec![
        MatrixFunction::analytic(vec![AnalyticColumn::single(ScalarForm::Cos { k: 1.3 }, a)]).expect("well formed"),
        MatrixFunction::analytic(vec![AnalyticColumn::single(ScalarForm::Sin { k: 0.7 }, b)]).expect("well formed"),
    ]
}
