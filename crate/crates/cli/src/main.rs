//! `fraccaputo` command-line driver: regenerates the benchmark tables and
//! curves as CSV and single runs or property ledgers as JSON.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fraccaputo::schemes::SchemeKind;
use serde::Serialize;

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "fraccaputo", version, about = "Fast Caputo derivative benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tail integral at β = 1.1 on the 6×4 (t, p) grid.
    TailTable(Flags),
    /// Pointwise kernel errors of both compressed schemes.
    SoeError(Flags),
    /// Manufactured-problem error sweep over a dyadic ladder of steps.
    Convergence(Flags),
    /// One diffusion solve, reported as JSON.
    Solve(Flags),
    /// Seeded inequality suites, reported as a JSON ledger.
    PropertySuite(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long = "T")]
    horizon: Option<f64>,
    /// L1, FIR, FIDR or GL; a comma-separated list for `convergence`.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<SchemeKind>,
    /// Preset mode count (9, 25 or 40); a list for `convergence`.
    #[arg(long, value_delimiter = ',')]
    modes: Vec<usize>,
    #[arg(long, allow_hyphen_values = true)]
    soe_a: Option<i32>,
    #[arg(long)]
    soe_b: Option<i32>,
    #[arg(long)]
    soe_n1: Option<usize>,
    #[arg(long)]
    soe_n2: Option<usize>,
    /// manufactured, nonlinear or zero.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "FRACCAPUTO_JOBS")]
    jobs: Option<usize>,
    /// JSON file with defaults; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    /// Largest step of the `convergence` ladder.
    #[arg(long)]
    dt_start: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    eps0_override: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gl_re_c_max: Option<f64>,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::load(self.config.as_deref())?;
        macro_rules! take {
            ($($f:ident => $g:ident),*) => {$( if let Some(v) = self.$f.clone() { c.$g = v; } )*};
        }
        take!(alpha => alpha, dt => dt, h => h, horizon => horizon, problem => problem, seed => seed, jobs => jobs,
              samples => samples, dt_start => dt_start, levels => levels, snapshots => snapshots, gl_re_c_max => gl_re_c_max);
        if self.soe_a.is_some() {
            c.soe_a = self.soe_a;
        }
        if self.soe_b.is_some() {
            c.soe_b = self.soe_b;
        }
        if self.soe_n1.is_some() {
            c.soe_n1 = self.soe_n1;
        }
        if self.soe_n2.is_some() {
            c.soe_n2 = self.soe_n2;
        }
        if self.eps0_override.is_some() {
            c.eps0_override = self.eps0_override;
        }
        if let Some(&s) = self.scheme.first() {
            c.scheme = s;
            c.schemes = self.scheme.clone();
        }
        if let Some(&m) = self.modes.first() {
            c.modes = m;
            c.mode_counts = self.modes.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Validation,
    PropertyFailure,
    Numerical,
}

#[derive(Debug, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn validation(message: String) -> Self {
        Self { kind: ErrorKind::Validation, message }
    }

    pub fn numerical(message: String) -> Self {
        Self { kind: ErrorKind::Numerical, message }
    }

    fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::PropertyFailure => 3,
            ErrorKind::Numerical => 4,
        }
    }
}

impl From<fraccaputo::Error> for CliError {
    fn from(e: fraccaputo::Error) -> Self {
        use fraccaputo::Error as E;
        let kind = match e {
            E::Domain(_) | E::InvalidParameter(_) | E::Contract(_) | E::SoeConstruction(_) | E::QuadratureConstruction { .. } => {
                ErrorKind::Validation
            }
            _ => ErrorKind::Numerical,
        };
        Self { kind, message: e.to_string() }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::TailTable(f) => commands::tail_table(&f.resolve()?, f.out.as_deref()),
        Command::SoeError(f) => commands::soe_error(&f.resolve()?, f.out.as_deref()),
        Command::Convergence(f) => commands::convergence(&f.resolve()?, f.out.as_deref()),
        Command::Solve(f) => commands::solve(&f.resolve()?, f.out.as_deref()),
        Command::PropertySuite(f) => commands::property_suite(&f.resolve()?, f.out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&serde_json::json!({ "error": e })).unwrap_or_else(|_| e.message.clone()));
            ExitCode::from(e.exit_code())
        }
    }
}
