//! `dnkit`: construction, reconstruction, analysis, monodromy and
//! verification of DN operators from JSON files.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{Common, Report, RunConfig};
use error::{CliError, EXIT_NUMERICAL, EXIT_OK, EXIT_VERIFICATION};

#[derive(Debug, Parser)]
#[command(name = "dnkit", version, about = "DN operators from matrices and back")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Operator, canonical forms and symmetry verdicts of a matrix.
    Construct {
        /// Matrix JSON, or `-` for standard input.
        input: PathBuf,
    },
    /// Matrix of an operator in canonical form.
    Reconstruct {
        /// Operator JSON (or a `construct` report), or `-`.
        input: PathBuf,
    },
    /// Singularities, residues, Fuchs classification, residue spectra and the
    /// expansion at infinity.
    Analyze { input: PathBuf },
    /// Numerical monodromy, its checks and the invariant bilinear form.
    Monodromy { input: PathBuf },
    /// Runs every property suite on random samples.
    Verify {
        /// Orders to sample; `--n` overrides.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 3, 4])]
        sizes: Vec<usize>,
        /// Cases per order for the exact and spectral suites.
        #[arg(long, default_value_t = 10)]
        cases: usize,
        /// Cases per order for the monodromy suite.
        #[arg(long, default_value_t = 2)]
        monodromy_cases: usize,
        /// Break the symmetry of the samples fed to the symmetry suite.
        #[arg(long)]
        corrupt_symmetry: bool,
    },
}

fn emit<T: Serialize>(cfg: RunConfig, result: T) -> Result<(), CliError> {
    let out = cfg.output.clone();
    let mut text = serde_json::to_string_pretty(&Report::new(cfg, result)).expect("report serializes");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Write { path, source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Failure {
    status: &'static str,
    message: String,
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let c = &cli.common;
    match cli.command {
        Command::Construct { input } => {
            let cfg = RunConfig::new("construct", Some(&input), c)?;
            let a = commands::load_matrix(&commands::read_json(&input)?, &cfg)?;
            emit(cfg, commands::construct(&a)?)?;
            Ok(EXIT_OK)
        }
        Command::Reconstruct { input } => {
            let cfg = RunConfig::new("reconstruct", Some(&input), c)?;
            let (l, n) = commands::load_operator(&commands::read_json(&input)?, &cfg)?;
            emit(cfg, commands::reconstruct(&l, n)?)?;
            Ok(EXIT_OK)
        }
        Command::Analyze { input } => {
            let cfg = RunConfig::new("analyze", Some(&input), c)?;
            let a = commands::load_matrix(&commands::read_json(&input)?, &cfg)?;
            let analysis = commands::analyze(&a, &cfg)?;
            emit(cfg, analysis)?;
            Ok(EXIT_OK)
        }
        Command::Monodromy { input } => {
            let cfg = RunConfig::new("monodromy", Some(&input), c)?;
            let a = commands::load_matrix(&commands::read_json(&input)?, &cfg)?;
            match commands::monodromy(&a, &cfg) {
                Ok(m) => {
                    let code = if m.verdict.passed { EXIT_OK } else { EXIT_VERIFICATION };
                    emit(cfg, m)?;
                    Ok(code)
                }
                // numerical failures still produce a report naming the cause
                Err(e) if e.exit_code() == EXIT_NUMERICAL => {
                    eprintln!("dnkit: {e}");
                    emit(cfg, Failure { status: "error", message: e.to_string() })?;
                    Ok(EXIT_NUMERICAL)
                }
                Err(e) => Err(e),
            }
        }
        Command::Verify { sizes, cases, monodromy_cases, corrupt_symmetry } => {
            let cfg = RunConfig::new("verify", None, c)?;
            let sizes = c.n.map_or(sizes, |n| vec![n]);
            let summary = commands::verify(&cfg, sizes, cases, monodromy_cases, corrupt_symmetry);
            for s in &summary.suites {
                eprintln!("{:<20} {:>5} cases {:>4} failures  {}", s.name, s.cases, s.failures, if s.passed() { "PASS" } else { "FAIL" });
            }
            let code = if summary.passed { EXIT_OK } else { EXIT_VERIFICATION };
            emit(cfg, summary)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dnkit: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
