mod commands;
mod config;
mod grid;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slugflow::ModelPair;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or configuration: exit 2.
    #[error("{0}")]
    Config(String),
    /// A check of the solution failed: exit 1.
    #[error("check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Solver(#[from] slugflow::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "slugflow", version, about = "Semi-analytic two-phase flow with a chemical slug")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0)]
    m0: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

impl ModelArgs {
    pub fn model(&self) -> Result<ModelPair, CliError> {
        ModelPair::new(self.m0, self.m, self.gamma, self.beta).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    S,
    C,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full solve from a TOML configuration; writes the CSV bundle and report.txt.
    Solve {
        config: PathBuf,
        /// Overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chemical front Φ(x) on a grid `a:b[:n][:lin|log]`.
    Front {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        t_inj: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All characteristic-family curves.
    Characteristics {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        t_inj: f64,
        /// Multiplies every family size.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rankine–Hugoniot residuals and admissibility verdict of one shock.
    CheckShock {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        s_minus: f64,
        #[arg(long)]
        s_plus: f64,
        #[arg(long)]
        c_minus: f64,
        #[arg(long)]
        c_plus: f64,
        /// Shock speed; defaults to `[f]/[s]`.
        #[arg(long)]
        v: Option<f64>,
        /// Also run the travelling-wave orbit oracle.
        #[arg(long)]
        orbit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cell-averaged L1 distance between two field CSVs on the same grid.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        component: Which,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks the structural assumptions on the flux and adsorption functions.
    ValidateModel {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Solve { config, out } => solve::run(&config, out),
        Cmd::Front { model, t_inj, x, out } => commands::front(&model, t_inj, &x, out),
        Cmd::Characteristics { model, t_inj, scale, out } => commands::characteristics(&model, t_inj, scale, out),
        Cmd::CheckShock { model, s_minus, s_plus, c_minus, c_plus, v, orbit, out } => {
            commands::check_shock(&model, [s_minus, s_plus, c_minus, c_plus], v, orbit, out)
        }
        Cmd::Compare { a, b, component, out } => commands::compare(&a, &b, component, out),
        Cmd::ValidateModel { model, n, out } => commands::validate_model(&model, n, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
