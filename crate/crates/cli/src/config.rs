use std::path::PathBuf;

use clap::{Args, ValueEnum};
use dnkit::monodromy::{Integrator, MonodromyConfig};
use dnkit::spectral::DEFAULT_TOL;
use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorArg {
    /// Double-double Taylor series.
    TaylorSeries,
    /// Dormand–Prince 5(4) in double precision.
    EmbeddedPair,
}

impl From<IntegratorArg> for Integrator {
    fn from(a: IntegratorArg) -> Self {
        match a {
            IntegratorArg::TaylorSeries => Integrator::TaylorSeries,
            IntegratorArg::EmbeddedPair => Integrator::EmbeddedPair,
        }
    }
}

/// Numerical settings shared by every subcommand.
#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Operator order; checked against the input when both are present.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Minimum separation of eigenvalues before the spectrum counts as degenerate.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol_spectral: f64,
    /// Local error per step of the embedded-pair integrator.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_ode: f64,
    /// Acceptance threshold for the monodromy checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_mono: f64,
    /// Order of the series expansion at infinity.
    #[arg(long, global = true, default_value_t = 12)]
    pub truncation: usize,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = IntegratorArg::TaylorSeries)]
    pub integrator: IntegratorArg,
}

/// Everything that determines a report, embedded verbatim in it.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: Option<String>,
    pub output: Option<String>,
    pub n: Option<usize>,
    pub tol_spectral: f64,
    pub tol_ode: f64,
    pub tol_mono: f64,
    pub truncation: usize,
    pub seed: u64,
    pub integrator: IntegratorArg,
}

impl RunConfig {
    pub fn new(command: &'static str, input: Option<&PathBuf>, c: &Common) -> Result<Self, CliError> {
        for (name, v) in [("--tol-spectral", c.tol_spectral), ("--tol-ode", c.tol_ode), ("--tol-mono", c.tol_mono)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Input(format!("{name} must be positive, got {v}")));
            }
        }
        if c.truncation == 0 {
            return Err(CliError::Input("--truncation must be positive".into()));
        }
        Ok(RunConfig {
            command,
            input: input.map(|p| p.display().to_string()),
            output: c.out.as_ref().map(|p| p.display().to_string()),
            n: c.n,
            tol_spectral: c.tol_spectral,
            tol_ode: c.tol_ode,
            tol_mono: c.tol_mono,
            truncation: c.truncation,
            seed: c.seed,
            integrator: c.integrator,
        })
    }

    pub fn monodromy(&self) -> MonodromyConfig {
        MonodromyConfig {
            integrator: self.integrator.into(),
            tol_ode: self.tol_ode,
            tol_mono: self.tol_mono,
            tol_spectral: self.tol_spectral,
            ..MonodromyConfig::default()
        }
    }
}

/// Envelope written by every subcommand. There are no timestamps, so equal
/// inputs give byte-identical output.
#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(config: RunConfig, result: T) -> Self {
        Report { tool: "dnkit", version: env!("CARGO_PKG_VERSION"), config, result }
    }
}
