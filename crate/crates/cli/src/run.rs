//! Orchestration of one `transform` run: build, run the engines, check,
//! write outputs.

use std::path::{Path, PathBuf};

use darboux_core::darboux::{
    chain_stepwise, closed_form_chain, make_first_order, transform_potential_once, ChainResult, Engine,
};
use darboux_core::verify::{
    annihilation_report, engine_equivalence, factorization_residual, intertwining_residual, identity_suite_with,
    permutation_invariance, schrodinger_residual, wronskian_derivative_residual, y_determinant_residual, Location,
    Report, SuiteOptions,
};
use serde::Serialize;

use crate::config::{Problem, RunConfig, Tolerances};
use crate::error::CliError;
use crate::output;

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineSummary {
    pub engine: Engine,
    pub singular_points: Vec<usize>,
    pub masked_x: Vec<f64>,
    /// `max ‖V_N - V_N†‖` over unmasked nodes.
    pub potential_hermiticity: f64,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub channels: usize,
    pub chain_length: usize,
    pub grid: GridSummary,
    /// Engine whose samples are in the CSV files.
    pub emitted_engine: Engine,
    pub engines: Vec<EngineSummary>,
    /// `max ‖F - F†‖` of the first step, when the operator checks ran.
    pub first_step_superpotential_hermiticity: Option<f64>,
    pub skipped: Vec<String>,
    pub checks: Vec<Report>,
    pub all_pass: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub output_dir: PathBuf,
}

fn renamed(mut r: Report, check: String) -> Report {
    r.check = check;
    r
}

fn column_report(problem: &Problem, tol: &Tolerances) -> Report {
    let mut worst = 0.0_f64;
    let mut location = None;
    for (k, cols) in problem.column_residuals.iter().enumerate() {
        for r in cols {
            if r.is_nan() || *r > worst || location.is_none() {
                worst = *r;
                location = Some(Location::Trial { index: k });
            }
        }
    }
    Report {
        check: "transformation-columns".into(),
        max_residual: worst,
        threshold: tol.ode,
        pass: worst <= tol.ode,
        worst_location: location,
        masked_count: 0,
    }
}

/// Runs everything the config asks for and writes `potential.csv`,
/// `states.csv` and `report.json` into `out_dir`.
pub fn run_config(cfg: &RunConfig, base: &Path, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let problem = cfg.build(base)?;
    let tol = cfg.tolerances;
    let Problem {
        grid,
        potential,
        set,
        states,
        probes,
        ..
    } = &problem;
    let n = set.n();
    let big_n = set.len();

    let mut results: Vec<ChainResult> = Vec::new();
    for engine in cfg.engine.engines() {
        let result = match engine {
            Engine::Stepwise => chain_stepwise(potential, set, states, grid)?,
            Engine::ClosedForm => closed_form_chain(potential, set, states, grid)?,
        };
        results.push(result);
    }
    let primary = results.last().expect("at least one engine");

    let mut checks = vec![column_report(&problem, &tol)];
    let mut skipped = Vec::new();

    if let Some(step) = results.iter().find(|r| r.engine() == Engine::Stepwise) {
        checks.push(annihilation_report(step, tol.ratio));
    }
    if let [a, b] = results.as_slice() {
        checks.extend(engine_equivalence(a, b, tol.engine)?);
    }
    for (s, phi) in primary.states().iter().enumerate() {
        let r = schrodinger_residual(primary.potential(), phi, primary.energies()[s], tol.operator)?;
        checks.push(renamed(r, format!("schrodinger-state-{s}")));
    }

    let first = &set.items()[0];
    let mut f_hermiticity = None;
    if potential.deriv_capability() >= 1 && first.function.max_order() >= 3 {
        let op = make_first_order(&first.function, grid)?;
        let v1 = transform_potential_once(potential, &first.function, grid)?;
        checks.push(intertwining_residual(potential, &v1, &op, probes, tol.operator)?);
        let fact = factorization_residual(&first.function, &first.lambdas, potential, &v1, &op, probes, tol.operator)?;
        f_hermiticity = Some(fact.superpotential_hermiticity);
        checks.extend(fact.reports);
    } else {
        skipped.push("intertwining and factorization: first transformation needs 3 derivatives and the potential 1".into());
    }

    checks.push(wronskian_derivative_residual(set, grid)?);
    if big_n >= 2 {
        checks.push(y_determinant_residual(set, grid, tol.ratio)?);
        if let Some(closed) = results.iter().find(|r| r.engine() == Engine::ClosedForm) {
            let reversed: Vec<usize> = (0..big_n).rev().collect();
            let other = closed_form_chain(potential, &set.permuted(&reversed)?, states, grid)?;
            checks.extend(permutation_invariance(closed, &other, tol.ratio)?);
        }
    }

    let engines = results
        .iter()
        .map(|r| EngineSummary {
            engine: r.engine(),
            singular_points: r.singular_points().to_vec(),
            masked_x: r.singular_points().iter().map(|&i| grid.x(i)).collect(),
            potential_hermiticity: r.diagnostics().hermiticity_deviation,
        })
        .collect();
    let all_pass = checks.iter().all(|r| r.pass);
    let report = RunReport {
        channels: n,
        chain_length: big_n,
        grid: GridSummary {
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            count: grid.count(),
        },
        emitted_engine: primary.engine(),
        engines,
        first_step_superpotential_hermiticity: f_hermiticity,
        skipped,
        checks,
        all_pass,
    };

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    output::write_text(&out_dir.join("potential.csv"), &output::potential_csv(primary.potential(), n))?;
    output::write_text(&out_dir.join("states.csv"), &output::states_csv(grid, primary.states(), n))?;
    output::write_json(&out_dir.join("report.json"), &report)?;
    Ok(RunOutcome {
        report,
        output_dir: out_dir.to_path_buf(),
    })
}

/// Output directory: explicit choice (flag or environment), then the
/// config's `output`, then `fallback`.
pub fn output_dir(explicit: Option<PathBuf>, cfg: &RunConfig, base: &Path, fallback: &str) -> PathBuf {
    match (explicit, &cfg.output) {
        (Some(dir), _) => dir,
        (None, Some(dir)) if dir.is_absolute() => dir.clone(),
        (None, Some(dir)) => base.join(dir),
        (None, None) => PathBuf::from(fallback),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Report>,
    pub all_pass: bool,
}

pub fn verify_identities(seed: u64, trials: usize, inject_failure: bool) -> Result<IdentityReport, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let checks = identity_suite_with(SuiteOptions {
        trials,
        seed,
        inject_failure,
    })?;
    Ok(IdentityReport {
        seed,
        trials,
        all_pass: checks.iter().all(|r| r.pass),
        checks,
    })
}

/// One line per check.
pub fn summary_lines(checks: &[Report]) -> Vec<String> {
    checks
        .iter()
        .map(|r| {
            format!(
                "{} {:<36} max {:.3e}  threshold {:.1e}{}",
                if r.pass { "PASS" } else { "FAIL" },
                r.check,
                r.max_residual,
                r.threshold,
                if r.masked_count > 0 { format!("  ({} masked)", r.masked_count) } else { String::new() }
            )
        })
        .collect()
}
