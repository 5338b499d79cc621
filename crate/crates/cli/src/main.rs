//! `bingham`: evaluate, bound, tabulate and verify truncated expansions of
//! the Bingham normalizing constant.
//!
//! Exit codes: 0 on success, 1 when the growth regime or the dimension
//! threshold rules out a requested bound, 2 on usage errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bingham",
    version,
    about = "Asymptotic expansions for the high-dimensional Bingham distribution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Optional growth regime `||S|| <= gamma0 d^{r/2}`; both flags or neither.
#[derive(Debug, Clone, Copy, Args)]
pub struct RegimeArgs {
    #[arg(long, requires = "r", allow_negative_numbers = true)]
    pub gamma0: Option<f64>,
    #[arg(long, requires = "gamma0", allow_negative_numbers = true)]
    pub r: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated normalizing constant, with its remainder bound under a regime.
    Psi {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        regime: RegimeArgs,
    },
    /// Truncated gradient of the normalizing constant as a matrix.
    Grad {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        regime: RegimeArgs,
    },
    /// Covariance expansion from truncations of 1/Psi (order l) and grad Psi (order m).
    Cov {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        regime: RegimeArgs,
    },
    /// Zonal polynomial C_(k) and the coefficients of its gradient.
    Zonal {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Remainder-bound tables over a grid of dimensions and orders.
    Bounds {
        #[arg(long, allow_negative_numbers = true)]
        gamma0: f64,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write `<PREFIX>_psi.<ext>` and `<PREFIX>_grad.<ext>` instead of stdout (csv only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest order whose two remainder bounds are at most eps.
    ChooseM {
        #[arg(long, allow_negative_numbers = true)]
        gamma0: f64,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long)]
        d: u64,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Compare the expansions with Monte-Carlo estimates.
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        l: u32,
        #[arg(long, default_value_t = 6)]
        m: u32,
        #[command(flatten)]
        regime: RegimeArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
    Text,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", one_line(&e.to_string()));
            return ExitCode::from(2);
        }
    };
    match commands::run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn one_line(msg: &str) -> String {
    msg.lines()
        .map(str::trim)
        .filter(|l| {
            !l.is_empty() && !l.starts_with("Usage:") && !l.starts_with("For more information")
        })
        .collect::<Vec<_>>()
        .join(" ")
}
