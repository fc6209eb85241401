//! Batch driver: `validate`, `solve`, `asym` and `selftest` over a JSON
//! experiment config, writing JSON reports and CSV plot data.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_asym, cmd_selftest, cmd_solve, cmd_validate, out_dir, NormArg, Outcome, SolveArgs, VariantArg, OUT_DIR_ENV};
pub use config::Config;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("missing artifacts: {0}")]
    MissingArtifacts(String),
    #[error("{0}")]
    Pipeline(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::MissingArtifacts(_) => 3,
            CliError::Pipeline(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<sector_geometry::GeometryError> for CliError {
    fn from(e: sector_geometry::GeometryError) -> Self {
        CliError::Pipeline(format!("geometry: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "sectorial-lab", about = "Sectorial Borel–Laplace solutions and their asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the problem hypotheses and both sector geometries.
    Validate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the Borel coefficients and assemble the sectorial solutions.
    Solve {
        config: PathBuf,
        #[arg(long = "N")]
        n: Option<usize>,
        /// `re,im;re,im;…`
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long)]
        t_grid: Option<String>,
        #[arg(long, value_enum, default_value = "eps")]
        variant: VariantArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cocycles, flatness fits, Cauchy–Heine coefficients, growth class and remainder bounds.
    Asym {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "eps")]
        variant: VariantArg,
        #[arg(long, value_enum, default_value = "q-relative")]
        norm: NormArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        solve_inline: bool,
    },
    /// Identity battery plus the synthetic fit and classifier batteries.
    Selftest {
        #[arg(long)]
        quick: bool,
        /// Perturb the reference Γ to confirm the battery catches it.
        #[arg(long, hide = true)]
        inject_gamma_bug: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Validate { config, out } => cmd_validate(&config, out.as_deref()),
        Command::Solve { config, n, eps_grid, t_grid, variant, out } => {
            let grid = |flag: &str, g: Option<String>| {
                g.map(|s| commands::parse_grid(&s).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))).transpose()
            };
            match (grid("eps-grid", eps_grid), grid("t-grid", t_grid)) {
                (Ok(eps_grid), Ok(t_grid)) => cmd_solve(&config, variant, &SolveArgs { n_max: n, eps_grid, t_grid }, &out_dir(out.as_deref())),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
        Command::Asym { config, variant, norm, out, solve_inline } => cmd_asym(&config, variant, norm, &out_dir(out.as_deref()), solve_inline),
        Command::Selftest { quick, inject_gamma_bug, out } => cmd_selftest(quick, inject_gamma_bug, out.as_deref()),
    };
    match result {
        Ok(o) => {
            print!("{}", o.stdout);
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
