//! Command-line front end. Exit codes: 0 all checks pass, 2 a check failed,
//! 1 any error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::demos;
use crate::error::CliError;
use crate::run::{output_dir, run_config, summary_lines, verify_identities};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "darboux", version, about = "Chains of Darboux transformations for the matrix Schrödinger equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the chain described by a JSON config and write CSV/JSON results.
    Transform {
        config: PathBuf,
        /// Output directory (overrides the config's `output`).
        #[arg(long, env = "DARBOUX_OUTPUT_DIR")]
        output: Option<PathBuf>,
    },
    /// Check the determinant identities on seeded random inputs.
    VerifyIdentities {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Perturb the Sylvester right-hand side (negative control).
        #[arg(long)]
        inject_failure: bool,
    },
    /// Run a shipped example.
    Demo {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long, env = "DARBOUX_OUTPUT_DIR")]
        output: Option<PathBuf>,
        /// List the examples.
        #[arg(long)]
        list: bool,
    },
}

fn exit_for(all_pass: bool) -> i32 {
    if all_pass {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

fn transform(cfg: &RunConfig, base: &Path, out: PathBuf) -> Result<i32, CliError> {
    let outcome = run_config(cfg, base, &out)?;
    for line in summary_lines(&outcome.report.checks) {
        println!("{line}");
    }
    println!("wrote {}", outcome.output_dir.display());
    Ok(exit_for(outcome.report.all_pass))
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Transform { config, output } => {
            let cfg = RunConfig::load(&config)?;
            let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
            let out = output_dir(output, &cfg, &base, "darboux-output");
            transform(&cfg, &base, out)
        }
        Command::VerifyIdentities {
            seed,
            trials,
            inject_failure,
        } => {
            let report = verify_identities(seed, trials, inject_failure)?;
            for line in summary_lines(&report.checks) {
                println!("{line}");
            }
            Ok(exit_for(report.all_pass))
        }
        Command::Demo { name, output, list } => {
            if list {
                for d in demos::DEMOS {
                    println!("{:<16} {}", d.name, d.summary);
                }
                return Ok(EXIT_PASS);
            }
            let name = name.expect("clap requires a name without --list");
            let demo = demos::find(&name).ok_or_else(|| CliError::UnknownDemo(name.clone()))?;
            let cfg = RunConfig::parse(demo.config)?;
            let out = output_dir(output, &cfg, Path::new("."), "darboux-output");
            transform(&cfg, Path::new("."), out)
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
