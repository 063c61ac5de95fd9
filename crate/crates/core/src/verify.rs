//! Residual checks for the operator identities, the determinant identities
//! and the agreement of the two engines. Every check produces a [`Report`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::darboux::{y_matrix_closed_form, ChainResult, FirstOrderOperator};
use crate::detkit::{det, lemma_residual, sylvester_with_rhs_scale, LemmaIndices, LemmaInput};
use crate::error::{Error, Result};
use crate::grid_calculus::{
    second_difference, AnalyticColumn, BasisTerm, Grid, MatrixFunction, PotentialSpec,
    SampledMatrix, ScalarForm,
};
use crate::wronskian::{Transformation, TransformationSet, WronskianBundle};
use crate::{hermiticity_deviation, max_abs, CMatrix};

/// Default threshold of the Schrödinger, intertwining and factorization checks.
pub const OPERATOR_TOL: f64 = 1e-6;
/// Default threshold of the Sylvester and lemma checks.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Default threshold of engine equivalence.
pub const ENGINE_TOL: f64 = 1e-8;
/// Default threshold of the `|Y_N|` check, operator annihilation and
/// permutation invariance.
pub const RATIO_TOL: f64 = 1e-9;

/// Where the largest residual of a check was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Location {
    Point { index: usize, x: f64 },
    Trial { index: usize },
}

/// Outcome of one check. `pass` is `max_residual <= threshold`; a NaN
/// residual never passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub worst_location: Option<Location>,
    pub masked_count: usize,
}

/// Accumulates residuals into a [`Report`].
#[derive(Debug, Clone)]
struct Tally {
    check: String,
    threshold: f64,
    worst: f64,
    location: Option<Location>,
    masked: usize,
}

impl Tally {
    fn new(check: impl Into<String>, threshold: f64) -> Self {
        Self {
            check: check.into(),
            threshold,
            worst: 0.0,
            location: None,
            masked: 0,
        }
    }

    fn observe(&mut self, residual: f64, location: Location) {
        if self.worst.is_nan() {
            return;
        }
        if residual.is_nan() || residual > self.worst || self.location.is_none() {
            self.worst = residual;
            self.location = Some(location);
        }
    }

    fn point(&mut self, residual: f64, grid: &Grid, index: usize) {
        self.observe(residual, Location::Point { index, x: grid.x(index) });
    }

    fn finish(self) -> Report {
        Report {
            pass: self.worst <= self.threshold,
            check: self.check,
            max_residual: self.worst,
            threshold: self.threshold,
            worst_location: self.location,
            masked_count: self.masked,
        }
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn interior(grid: &Grid) -> std::ops::Range<usize> {
    2..grid.count() - 2
}

/// `max ‖-Φ'' + VΦ - EΦ‖ / max(1, ‖Φ‖)` over interior unmasked nodes, with
/// `Φ''` from fourth-order centered differences.
pub fn schrodinger_residual(v: &SampledMatrix, phi: &SampledMatrix, energy: f64, threshold: f64) -> Result<Report> {
    let grid = *v.grid();
    if !grid.same_nodes(phi.grid()) {
        return Err(Error::DimensionMismatch("potential and state live on different grids".into()));
    }
    let mut tally = Tally::new("schrodinger", threshold);
    for i in interior(&grid) {
        let (Some(vi), Some(p), Some(d2)) = (v.at(i), phi.at(i), second_difference(phi.values(), &grid, i)) else {
            tally.masked += 1;
            continue;
        };
        let r = -d2 + vi * p - p * c(energy);
        tally.point(max_abs(&r) / max_abs(p).max(1.0), &grid, i);
    }
    Ok(tally.finish())
}

fn probe_jet(probe: &MatrixFunction, grid: &Grid, i: usize, order: usize) -> Result<Vec<CMatrix>> {
    if probe.max_order() < order {
        return Err(Error::DerivativeCapability {
            requested: order,
            available: probe.max_order(),
        });
    }
    (0..=order).map(|m| probe.eval(grid.x(i), m)).collect()
}

fn require_jet(op: &FirstOrderOperator, order: usize) -> Result<()> {
    if op.jet_order() < order {
        return Err(Error::DerivativeCapability {
            requested: order,
            available: op.jet_order(),
        });
    }
    Ok(())
}

/// `max ‖L(h₀f) - h₁(Lf)‖ / max(1, ‖L(h₀f)‖)` over probes and unmasked nodes.
/// Probes need three derivatives, `V₀` one.
pub fn intertwining_residual(
    v0: &PotentialSpec,
    v1: &SampledMatrix,
    op: &FirstOrderOperator,
    probes: &[MatrixFunction],
    threshold: f64,
) -> Result<Report> {
    require_jet(op, 2)?;
    let grid = *op.grid();
    let mut tally = Tally::new("intertwining", threshold);
    for i in 0..grid.count() {
        let (Some(f), Some(v1i)) = (op.jet(i), v1.at(i)) else {
            tally.masked += 1;
            continue;
        };
        let x = grid.x(i);
        let (v, dv) = (v0.eval(x, 0)?, v0.eval(x, 1)?);
        for probe in probes {
            let g = probe_jet(probe, &grid, i, 3)?;
            let h0g = -&g[2] + &v * &g[0];
            let dh0g = -&g[3] + &dv * &g[0] + &v * &g[1];
            let lhs = &dh0g - &f[0] * &h0g;
            let lg = &g[1] - &f[0] * &g[0];
            let d2lg = &g[3] - &f[2] * &g[0] - &f[1] * &g[1] * c(2.0) - &f[0] * &g[2];
            let rhs = -d2lg + v1i * &lg;
            tally.point(max_abs(&(&lhs - &rhs)) / max_abs(&lhs).max(1.0), &grid, i);
        }
    }
    Ok(tally.finish())
}

/// Reports of [`factorization_residual`] and the Hermiticity deviation of `F`.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    pub reports: Vec<Report>,
    /// `max ‖F - F†‖` over unmasked nodes.
    pub superpotential_hermiticity: f64,
}

/// Probe residuals of `L⁺L = h₀ - 𝒰Λ𝒰⁻¹` and `LL⁺ = h₁ - 𝒰Λ𝒰⁻¹`.
///
/// Two conjugates are checked. With `L⁺ = -D - F†` both identities hold when
/// `F` is Hermitian. With `-D - F` they hold for any `F`, since
/// `F' + F² = V₀ - 𝒰Λ𝒰⁻¹`. When `Λ = λI` the factorization
/// `h₀ = L⁺L + λI` is reported as well.
pub fn factorization_residual(
    u: &MatrixFunction,
    lambdas: &[f64],
    v0: &PotentialSpec,
    v1: &SampledMatrix,
    op: &FirstOrderOperator,
    probes: &[MatrixFunction],
    threshold: f64,
) -> Result<FactorizationReport> {
    require_jet(op, 1)?;
    let n = v0.n();
    if lambdas.len() != n || u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch(format!("need an {n}x{n} generator and {n} eigenvalues")));
    }
    let grid = *op.grid();
    let lam = CMatrix::from_diagonal(&crate::CVector::from_iterator(n, lambdas.iter().map(|&l| c(l))));
    let scalar_lambda = lambdas.iter().all(|&l| l == lambdas[0]);
    let mut tallies = vec![
        Tally::new("factorization-adjoint-LplusL", threshold),
        Tally::new("factorization-adjoint-LLplus", threshold),
        Tally::new("factorization-riccati-LplusL", threshold),
        Tally::new("factorization-riccati-LLplus", threshold),
    ];
    if scalar_lambda {
        tallies.push(Tally::new("factorization-lambda-identity", threshold));
    }
    let mut hermiticity = 0.0_f64;
    for i in 0..grid.count() {
        let (Some(f), Some(v1i)) = (op.jet(i), v1.at(i)) else {
            tallies.iter_mut().for_each(|t| t.masked += 1);
            continue;
        };
        let x = grid.x(i);
        let uu = u.eval(x, 0)?;
        let Some(uinv) = uu.clone().try_inverse() else {
            tallies.iter_mut().for_each(|t| t.masked += 1);
            continue;
        };
        let k = &uu * &lam * &uinv;
        let v = v0.eval(x, 0)?;
        let fd = f[0].adjoint();
        let dfd = f[1].adjoint();
        hermiticity = hermiticity.max(hermiticity_deviation(&f[0]));
        for probe in probes {
            let g = probe_jet(probe, &grid, i, 2)?;
            let lg = &g[1] - &f[0] * &g[0];
            let dlg = &g[2] - &f[1] * &g[0] - &f[0] * &g[1];
            let h0g = -&g[2] + &v * &g[0];
            let h1g = -&g[2] + v1i * &g[0];
            let kg = &k * &g[0];
            // L⁺ = -D - F†
            let adj_ll = -&dlg - &fd * &lg;
            let adj_g = -&g[1] - &fd * &g[0];
            let d_adj_g = -&g[2] - &dfd * &g[0] - &fd * &g[1];
            let ll_adj = &d_adj_g - &f[0] * &adj_g;
            // -D - F
            let ric_ll = -&dlg - &f[0] * &lg;
            let ric_g = -&g[1] - &f[0] * &g[0];
            let d_ric_g = -&g[2] - &f[1] * &g[0] - &f[0] * &g[1];
            let ll_ric = &d_ric_g - &f[0] * &ric_g;

            let target0 = &h0g - &kg;
            let target1 = &h1g - &kg;
            let rel = |a: &CMatrix, b: &CMatrix| max_abs(&(a - b)) / max_abs(b).max(1.0);
            tallies[0].point(rel(&adj_ll, &target0), &grid, i);
            tallies[1].point(rel(&ll_adj, &target1), &grid, i);
            tallies[2].point(rel(&ric_ll, &target0), &grid, i);
            tallies[3].point(rel(&ll_ric, &target1), &grid, i);
            if scalar_lambda {
                let fact = &adj_ll + &g[0] * c(lambdas[0]);
                tallies[4].point(rel(&fact, &h0g), &grid, i);
            }
        }
    }
    Ok(FactorizationReport {
        reports: tallies.into_iter().map(Tally::finish).collect(),
        superpotential_hermiticity: hermiticity,
    })
}

/// Seven-point sixth-order centered first derivative at node `i`.
fn centered_sixth(values: &[Complex64], h: f64, i: usize) -> Complex64 {
    const W: [f64; 7] = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0];
    W.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (m, w)| acc + values[i + m - 3] * *w) / (60.0 * h)
}

/// Centered differences of `|W|` against `Σ_m |W_mm|` at interior nodes,
/// divided by `max(1, max_x |Σ_m |W_mm||)`. The threshold is `10 h⁴`.
///
/// The difference is of sixth order: with `|W| ~ e^{Kx}` a fourth-order
/// stencil alone errs by about `K⁴h⁴/30`, above the threshold once `K > 4`.
pub fn wronskian_derivative_residual(set: &TransformationSet, grid: &Grid) -> Result<Report> {
    let n = set.n();
    let big_n = set.len();
    let samples = (0..grid.count())
        .into_par_iter()
        .map(|i| {
            let bundle = WronskianBundle::from_jets(grid.x(i), n, set.jets(grid.x(i), big_n)?)?;
            let mut sum = Complex64::new(0.0, 0.0);
            for m in 0..n {
                sum += det(&bundle.row_replace_matrix(m, m)?);
            }
            Ok((det(bundle.matrix()), sum))
        })
        .collect::<Result<Vec<_>>>()?;
    let w: Vec<Complex64> = samples.iter().map(|s| s.0).collect();
    let scale = samples.iter().map(|s| s.1.norm()).fold(1.0, f64::max);
    let h = grid.spacing();
    let mut tally = Tally::new("wronskian-derivative", 10.0 * h.powi(4));
    for i in 3..grid.count() - 3 {
        tally.point((centered_sixth(&w, h, i) - samples[i].1).norm() / scale, grid, i);
    }
    Ok(tally.finish())
}

/// `det(Y_N)` from bordered determinants against `|W_N| / |W_{N-1}|` at
/// every node.
pub fn y_determinant_residual(set: &TransformationSet, grid: &Grid, threshold: f64) -> Result<Report> {
    let mut tally = Tally::new("y-determinant", threshold);
    for i in 0..grid.count() {
        match y_matrix_closed_form(set, grid.x(i)) {
            Ok(y) => tally.point(y.relative_residual(), grid, i),
            Err(Error::Masked { .. }) => tally.masked += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(tally.finish())
}

/// `max ‖a - b‖ / max(1, ‖b‖)` over interior nodes unmasked in both.
pub fn field_agreement(check: &str, a: &SampledMatrix, b: &SampledMatrix, threshold: f64) -> Result<Report> {
    let grid = *b.grid();
    if !grid.same_nodes(a.grid()) {
        return Err(Error::DimensionMismatch(format!("{check}: fields live on different grids")));
    }
    let mut tally = Tally::new(check, threshold);
    for i in interior(&grid) {
        let (Some(x), Some(y)) = (a.at(i), b.at(i)) else {
            tally.masked += 1;
            continue;
        };
        tally.point(max_abs(&(x - y)) / max_abs(y).max(1.0), &grid, i);
    }
    Ok(tally.finish())
}

/// Potential and state agreement between two chain results.
pub fn engine_equivalence(a: &ChainResult, b: &ChainResult, threshold: f64) -> Result<Vec<Report>> {
    if a.states().len() != b.states().len() {
        return Err(Error::DimensionMismatch("results carry different numbers of states".into()));
    }
    let mut out = vec![field_agreement("engine-equivalence-potential", a.potential(), b.potential(), threshold)?];
    for (s, (x, y)) in a.states().iter().zip(b.states()).enumerate() {
        out.push(field_agreement(&format!("engine-equivalence-state-{s}"), x, y, threshold)?);
    }
    Ok(out)
}

/// `F_N` and state agreement between a closed-form result and the result
/// for a reordered set.
pub fn permutation_invariance(a: &ChainResult, b: &ChainResult, threshold: f64) -> Result<Vec<Report>> {
    let mut out = vec![field_agreement("permutation-superpotential", a.superpotential(), b.superpotential(), threshold)?];
    for (s, (x, y)) in a.states().iter().zip(b.states()).enumerate() {
        out.push(field_agreement(&format!("permutation-state-{s}"), x, y, threshold)?);
    }
    Ok(out)
}

/// Per-step annihilation `‖(D - F_k)Y_k‖` from a stepwise result.
pub fn annihilation_report(result: &ChainResult, threshold: f64) -> Report {
    let mut tally = Tally::new("annihilation", threshold);
    for (k, a) in result.diagnostics().annihilation.iter().enumerate() {
        tally.observe(*a, Location::Trial { index: k });
    }
    tally.finish()
}

/// Options of [`identity_suite_with`].
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub trials: usize,
    pub seed: u64,
    /// Scale the Sylvester right-hand side by `1 + 1e-6`.
    pub inject_failure: bool,
}

/// Random complex entries in `[-1, 1]²` plus `2I` on the square part.
fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, shift: bool) -> CMatrix {
    CMatrix::from_fn(rows, cols, |r, col| {
        let z = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if shift && r == col {
            z + c(2.0)
        } else {
            z
        }
    })
}

const SUITE_FORMS: usize = 5;

fn random_form(rng: &mut ChaCha8Rng) -> ScalarForm {
    let k = rng.gen_range(0.1..=0.6);
    match rng.gen_range(0..SUITE_FORMS) {
        0 => ScalarForm::Exp { k },
        1 => ScalarForm::Exp { k: -k },
        2 => ScalarForm::Cosh { k },
        3 => ScalarForm::Sinh { k },
        _ => ScalarForm::Cos { k },
    }
}

/// Random analytic free-particle set: every column is one form times a
/// random vector, distinct eigenvalue lists by construction.
pub fn random_analytic_set(rng: &mut ChaCha8Rng, n: usize, big_n: usize) -> TransformationSet {
    loop {
        let mut items = Vec::with_capacity(big_n);
        for _ in 0..big_n {
            let mut columns = Vec::with_capacity(n);
            let mut lambdas = Vec::with_capacity(n);
            for _ in 0..n {
                let form = random_form(rng);
                lambdas.push(form.free_eigenvalue().expect("free-particle form"));
                let vector = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), 0.0)).collect();
                columns.push(AnalyticColumn {
                    terms: vec![BasisTerm { form, vector }],
                });
            }
            items.push(Transformation::new(
                MatrixFunction::analytic(columns).expect("columns share a height"),
                lambdas,
            ));
        }
        if let Ok(set) = TransformationSet::new(items) {
            return set;
        }
    }
}

pub fn identity_suite(trials: usize, seed: u64) -> Result<Vec<Report>> {
    identity_suite_with(SuiteOptions {
        trials,
        seed,
        inject_failure: false,
    })
}

/// Sylvester and lemma residuals over `trials` random inputs each, and the
/// Wronskian derivative and `|Y_N|` identities over `min(trials, 25)` random
/// analytic sets.
pub fn identity_suite_with(options: SuiteOptions) -> Result<Vec<Report>> {
    if options.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    let sylvester_inputs: Vec<(CMatrix, usize)> = (0..options.trials)
        .map(|_| {
            let dim = rng.gen_range(2..=8);
            let p = rng.gen_range(1..dim);
            (random_matrix(&mut rng, dim, dim, true), p)
        })
        .collect();
    let lemma_inputs: Vec<(LemmaInput, LemmaIndices)> = (0..options.trials)
        .map(|_| {
            let p = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=3);
            let input = LemmaInput {
                a: random_matrix(&mut rng, p, p, true),
                b_rows: random_matrix(&mut rng, 2, p + n, false),
                a_cols: random_matrix(&mut rng, p, n, false),
            };
            let j = rng.gen_range(0..2);
            let idx = LemmaIndices {
                k: rng.gen_range(0..n),
                s: rng.gen_range(0..p),
                j,
                t: 1 - j,
            };
            (input, idx)
        })
        .collect();
    let set_count = options.trials.min(25);
    let sets: Vec<TransformationSet> = (0..set_count)
        .map(|_| {
            let n = rng.gen_range(1..=2);
            let big_n = rng.gen_range(1..=2);
            random_analytic_set(&mut rng, n, big_n)
        })
        .collect();
    let y_sets: Vec<TransformationSet> = (0..set_count)
        .map(|_| {
            let n = rng.gen_range(1..=2);
            let big_n = rng.gen_range(2..=3);
            random_analytic_set(&mut rng, n, big_n)
        })
        .collect();

    let scale = if options.inject_failure { 1.0 + 1e-6 } else { 1.0 };
    let sylvester = sylvester_inputs
        .par_iter()
        .map(|(a, p)| sylvester_with_rhs_scale(a, *p, scale).map(|s| s.residual))
        .collect::<Result<Vec<_>>>()?;
    let lemma = lemma_inputs
        .par_iter()
        .map(|(input, idx)| lemma_residual(input, *idx))
        .collect::<Result<Vec<_>>>()?;

    let mut reports = Vec::new();
    for (name, residuals) in [("sylvester", sylvester), ("lemma", lemma)] {
        let mut tally = Tally::new(name, IDENTITY_TOL);
        for (t, r) in residuals.into_iter().enumerate() {
            tally.observe(r, Location::Trial { index: t });
        }
        reports.push(tally.finish());
    }

    let grid = Grid::new(-2.0, 2.0, 201)?;
    let derivative = sets
        .iter()
        .map(|s| wronskian_derivative_residual(s, &grid))
        .collect::<Result<Vec<_>>>()?;
    reports.push(merge("wronskian-derivative", derivative));

    let points = Grid::new(-2.0, 2.0, 21)?;
    let ydet = y_sets
        .iter()
        .map(|s| y_determinant_residual(s, &points, RATIO_TOL))
        .collect::<Result<Vec<_>>>()?;
    reports.push(merge("y-determinant", ydet));
    Ok(reports)
}

/// Worst of several reports of the same check; the location is the trial
/// index of the worst one.
fn merge(check: &str, parts: Vec<Report>) -> Report {
    let threshold = parts.first().map_or(0.0, |r| r.threshold);
    let mut tally = Tally::new(check, threshold);
    for (t, r) in parts.iter().enumerate() {
        tally.observe(r.max_residual, Location::Trial { index: t });
        tally.masked += r.masked_count;
    }
    tally.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::{make_first_order, transform_potential_once};
    use crate::detkit::sylvester_residual;

    fn column(form: ScalarForm, v: &[f64]) -> MatrixFunction {
        MatrixFunction::analytic(vec![AnalyticColumn::single(form, v.iter().map(|&x| c(x)).collect())]).unwrap()
    }

    #[test]
    fn plane_wave_is_an_eigenfunction() {
        let g = Grid::new(-3.0, 3.0, 601).unwrap();
        let v = SampledMatrix::from_function(&MatrixFunction::analytic_diagonal(vec![ScalarForm::Poly { coeffs: vec![0.0] }; 2]).unwrap(), &g, 0).unwrap();
        let phi = SampledMatrix::from_function(&column(ScalarForm::Expi { k: 1.0 }, &[1.0, 0.0]), &g, 0).unwrap();
        let r = schrodinger_residual(&v, &phi, 1.0, OPERATOR_TOL).unwrap();
        assert!(r.pass && r.max_residual <= 1e-7, "{r:?}");
        let line = SampledMatrix::from_function(&column(ScalarForm::Poly { coeffs: vec![0.0, 1.0] }, &[1.0, 0.0]), &g, 0).unwrap();
        assert!(!schrodinger_residual(&v, &line, 1.0, OPERATOR_TOL).unwrap().pass);
    }

    #[test]
    fn nan_never_passes() {
        let mut t = Tally::new("x", 1.0);
        t.observe(0.5, Location::Trial { index: 0 });
        t.observe(f64::NAN, Location::Trial { index: 1 });
        t.observe(0.1, Location::Trial { index: 2 });
        let r = t.finish();
        assert!(!r.pass);
        assert_eq!(r.worst_location, Some(Location::Trial { index: 1 }));
    }

    #[test]
    fn intertwining_with_exponential_generator() {
        let g = Grid::new(-2.0, 2.0, 81).unwrap();
        let u = MatrixFunction::scalar(ScalarForm::Exp { k: 0.8 });
        let v0 = PotentialSpec::zero(1);
        let op = make_first_order(&u, &g).unwrap();
        let v1 = transform_potential_once(&v0, &u, &g).unwrap();
        let probes = [MatrixFunction::scalar(ScalarForm::Expi { k: 1.3 })];
        let r = intertwining_residual(&v0, &v1, &op, &probes, OPERATOR_TOL).unwrap();
        assert!(r.max_residual <= 1e-8, "{r:?}");
    }

    #[test]
    fn intertwining_negative_control() {
        let g = Grid::new(-2.0, 2.0, 81).unwrap();
        let u = MatrixFunction::scalar(ScalarForm::Cosh { k: 1.0 });
        let v0 = PotentialSpec::zero(1);
        let op = make_first_order(&u, &g).unwrap();
        let wrong = SampledMatrix::from_function(&MatrixFunction::scalar(ScalarForm::Poly { coeffs: vec![0.0] }), &g, 0).unwrap();
        let probes = [MatrixFunction::scalar(ScalarForm::Sin { k: 2.0 })];
        assert!(!intertwining_residual(&v0, &wrong, &op, &probes, OPERATOR_TOL).unwrap().pass);
    }

    #[test]
    fn scalar_factorization() {
        let g = Grid::new(-3.0, 3.0, 121).unwrap();
        let u = MatrixFunction::scalar(ScalarForm::Cosh { k: 1.0 });
        let v0 = PotentialSpec::zero(1);
        let op = make_first_order(&u, &g).unwrap();
        let v1 = transform_potential_once(&v0, &u, &g).unwrap();
        let probes = [MatrixFunction::scalar(ScalarForm::Sin { k: 2.0 })];
        let r = factorization_residual(&u, &[-1.0], &v0, &v1, &op, &probes, OPERATOR_TOL).unwrap();
        assert_eq!(r.reports.len(), 5);
        for rep in &r.reports {
            assert!(rep.max_residual <= 1e-8, "{rep:?}");
        }
        // Wrong eigenvalue: the λI factorization must fail.
        let bad = factorization_residual(&u, &[-2.0], &v0, &v1, &op, &probes, OPERATOR_TOL).unwrap();
        assert!(bad.reports.iter().all(|r| !r.pass));
    }

    #[test]
    fn non_hermitian_superpotential() {
        // Columns e^{x}(1, 0)ᵗ and e^{2x}(1, 1)ᵗ: F = [[1, 1], [0, 2]].
        let g = Grid::new(-1.0, 1.0, 41).unwrap();
        let u = MatrixFunction::analytic(vec![
            AnalyticColumn::single(ScalarForm::Exp { k: 1.0 }, vec![c(1.0), c(0.0)]),
            AnalyticColumn::single(ScalarForm::Exp { k: 2.0 }, vec![c(1.0), c(1.0)]),
        ])
        .unwrap();
        let v0 = PotentialSpec::zero(2);
        let op = make_first_order(&u, &g).unwrap();
        let v1 = transform_potential_once(&v0, &u, &g).unwrap();
        let probes = [column(ScalarForm::Cos { k: 1.5 }, &[1.0, -0.5])];
        let r = factorization_residual(&u, &[-1.0, -4.0], &v0, &v1, &op, &probes, OPERATOR_TOL).unwrap();
        assert!((r.superpotential_hermiticity - 1.0).abs() < 1e-12);
        let by_name = |n: &str| r.reports.iter().find(|x| x.check == n).unwrap().clone();
        assert!(by_name("factorization-riccati-LplusL").pass);
        assert!(by_name("factorization-riccati-LLplus").pass);
        assert!(!by_name("factorization-adjoint-LplusL").pass);
        assert!(!by_name("factorization-adjoint-LLplus").pass);
    }

    #[test]
    fn suite_is_deterministic_and_passes() {
        let a = identity_suite(50, 7).unwrap();
        let b = identity_suite(50, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.pass), "{a:?}");
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn injected_failure_fails_sylvester() {
        let r = identity_suite_with(SuiteOptions {
            trials: 5,
            seed: 1,
            inject_failure: true,
        })
        .unwrap();
        assert!(!r.iter().find(|r| r.check == "sylvester").unwrap().pass);
        assert!(identity_suite(0, 1).is_err());
    }

    #[test]
    fn identity_inputs_give_zero() {
        for p in 1..6 {
            assert_eq!(sylvester_residual(&CMatrix::identity(6, 6), p).unwrap().residual, 0.0);
        }
    }
}
