mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, FileConfig, Resolved, SpectrumFlags};

/// Runtime failures, split by exit code: 1 for domain or verification
/// failures, 2 for requests that were wrong before any numerics ran.
pub enum Failure {
    Run(String),
    Config(String),
}

impl Failure {
    fn run(e: cohstate_core::Error) -> Self {
        use cohstate_core::Error::*;
        match &e {
            InvalidSpectrum(_) | InvalidPolicy(_) | InvalidTimeGrid => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

#[derive(Parser)]
#[command(
    name = "cohstate",
    version,
    about = "Coherent states for discrete spectra: tables, states, scans, and postulate checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Spectrum kind: harmonic, hydrogen1d, custom-table, custom-formula
    #[arg(long = "spec")]
    spec: Option<String>,
    /// Frequency scale; defaults to 1
    #[arg(long)]
    omega: Option<f64>,
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative truncation tolerance for series evaluation
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    /// Hard cap on series terms
    #[arg(long = "n-cap")]
    n_cap: Option<usize>,
    /// Comma-separated level values for custom-table
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    levels: Option<Vec<f64>>,
    /// Formula family for custom-formula: power-law or affine-capped
    #[arg(long)]
    family: Option<String>,
    /// Family parameter: the exponent p, or the level cap
    #[arg(long = "family-param")]
    family_param: Option<f64>,
}

impl Common {
    fn resolve(&self) -> Result<Resolved, ConfigError> {
        let file = match &self.config {
            Some(path) => config::load_file(path)?,
            None => FileConfig::default(),
        };
        let flags = SpectrumFlags {
            kind: self.spec.as_deref(),
            omega: self.omega,
            levels: self.levels.as_deref(),
            family: self.family.as_deref(),
            family_param: self.family_param,
        };
        config::resolve(&file, &flags, self.rel_tol, self.n_cap)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit levels e_n and moment products rho_n as CSV
    Table {
        #[command(flatten)]
        common: Common,
        /// Last level index to emit
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: usize,
    },
    /// Emit the coefficient vector of one state |J, gamma>
    State {
        #[command(flatten)]
        common: Common,
        #[arg(long = "J")]
        j: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gamma: f64,
    },
    /// Sweep J and emit energy moments and identity residuals
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long = "J-min")]
        j_min: f64,
        #[arg(long = "J-max")]
        j_max: f64,
        #[arg(long)]
        points: usize,
    },
    /// Emit the survival probability P(t) over a time grid
    Autocorr {
        #[command(flatten)]
        common: Common,
        #[arg(long = "J")]
        j: f64,
        /// End of the time grid, which starts at 0
        #[arg(long = "t-max")]
        t_max: f64,
        /// Number of samples, endpoints included
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Check the four defining properties and report pass/fail per postulate
    Verify {
        #[command(flatten)]
        common: Common,
        /// Diagonal unity checks run for n = 0..n_max
        #[arg(long = "n-max", default_value_t = 200)]
        n_max: usize,
        /// Largest Bohr window; the decay fit uses this and two decades below
        #[arg(long = "gamma-window", default_value_t = 1e4)]
        gamma_window: f64,
    },
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Table { common, n_max } => {
            let res = common.resolve()?;
            commands::table(&res, n_max, common.out.as_deref())
        }
        Command::State { common, j, gamma } => {
            let res = common.resolve()?;
            commands::state(&res, j, gamma, common.out.as_deref())
        }
        Command::Scan {
            common,
            j_min,
            j_max,
            points,
        } => {
            let res = common.resolve()?;
            commands::scan(&res, j_min, j_max, points, common.out.as_deref())
        }
        Command::Autocorr {
            common,
            j,
            t_max,
            steps,
        } => {
            let res = common.resolve()?;
            commands::autocorr(&res, j, t_max, steps, common.out.as_deref())
        }
        Command::Verify {
            common,
            n_max,
            gamma_window,
        } => {
            let res = common.resolve()?;
            verify::verify(&res, n_max, gamma_window, common.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
