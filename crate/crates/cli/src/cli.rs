use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pok::fitting::{log_spaced_orders, FitModel};
use pok::Settings;

use crate::commands::*;
use crate::output::{Format, Table};
use crate::{CliError, EXIT_CONJECTURE, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "pok", version, about = "Poisson distribution of order k: pmf, modes and double-mode searches")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output encoding
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Final root bracket width
    #[arg(long, default_value_t = 1e-12, global = true)]
    pub tol: f64,
    /// Significant digits for extended-precision re-evaluation
    #[arg(long, default_value_t = 30, global = true)]
    pub digits: u32,
}

/// Either a single `--k` or an inclusive `--k-min`/`--k-max` range.
#[derive(Debug, Args)]
pub struct Orders {
    #[arg(long, conflicts_with_all = ["k_min", "k_max"])]
    pub k: Option<usize>,
    #[arg(long, requires = "k_max")]
    pub k_min: Option<usize>,
    #[arg(long, requires = "k_min")]
    pub k_max: Option<usize>,
}

impl Orders {
    fn resolve(&self, default: Option<(usize, usize)>) -> Result<Vec<usize>, CliError> {
        let (lo, hi) = match (self.k, self.k_min, self.k_max, default) {
            (Some(k), _, _, _) => (k, k),
            (None, Some(a), Some(b), _) => (a, b),
            (None, _, _, Some(d)) => d,
            _ => return Err(CliError::Usage("give --k or --k-min and --k-max".into())),
        };
        if lo > hi {
            return Err(CliError::Usage(format!("--k-min {lo} exceeds --k-max {hi}")));
        }
        Ok((lo..=hi).collect())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Linear,
    Powerlaw,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// pmf and h values for n = 0..=n_max
    Pmf {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Mean, variance, median and modes
    Stats {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Root of h_k(k; lambda) = 1
    Root {
        #[command(flatten)]
        orders: Orders,
    },
    /// The lambda with h_k(n; lambda) = 1
    UnitRoot {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// First double mode for each order
    DoubleMode {
        #[command(flatten)]
        orders: Orders,
        /// Use this many log-spaced orders from the range instead of all of them
        #[arg(long)]
        samples: Option<usize>,
        /// Leave out orders whose double mode cannot be separated from the runner-up
        #[arg(long)]
        skip_ties: bool,
    },
    /// Integers that are never a mode
    Excluded {
        #[command(flatten)]
        orders: Orders,
        #[arg(long)]
        n_upper: Option<usize>,
    },
    /// Excluded values as four tables, one per regime (k = 2..=41)
    Tables {
        #[command(flatten)]
        orders: Orders,
    },
    /// Mode as a step function of lambda
    Breakpoints {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda_max: f64,
    },
    /// Breakpoints where at least `arity` values tie
    Multimodal {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda_max: f64,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
    /// Least-squares fit of two columns of a CSV or JSON-lines file
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Abscissa column (default: first column)
        #[arg(long)]
        x: Option<String>,
        /// Ordinate column (default: second column)
        #[arg(long)]
        y: Option<String>,
    },
    /// Numerical checks of the mode conjectures per order
    Conjectures {
        #[command(flatten)]
        orders: Orders,
    },
}

fn settings(common: &Common) -> Result<Settings, CliError> {
    let s = Settings {
        root_tol: common.tol,
        digits: common.digits,
        ..Settings::default()
    };
    s.validate()?;
    Ok(s)
}

/// Runs one parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let s = settings(&cli.common)?;
    let mut code = EXIT_OK;
    let table: Table = match &cli.command {
        Command::Pmf { k, lambda, n_max } => cmd_pmf(*k, *lambda, *n_max)?,
        Command::Stats { k, lambda } => cmd_stats(*k, *lambda, &s)?,
        Command::Root { orders } => cmd_root(&orders.resolve(None)?, &s)?,
        Command::UnitRoot { k, n } => cmd_unit_root(*k, *n, &s)?,
        Command::DoubleMode { orders, samples, skip_ties } => {
            let mut ks = orders.resolve(None)?;
            if let Some(count) = samples {
                ks = log_spaced_orders(ks[0], ks[ks.len() - 1], *count);
            }
            let (t, skipped) = cmd_double_mode(&ks, *skip_ties, &s)?;
            for k in skipped {
                eprintln!("k = {k}: runner-up root within tolerance, left out");
            }
            t
        }
        Command::Excluded { orders, n_upper } => cmd_excluded(&orders.resolve(None)?, *n_upper, &s)?,
        Command::Tables { orders } => cmd_tables(&orders.resolve(Some((2, 41)))?, &s)?,
        Command::Breakpoints { k, lambda_max } => cmd_breakpoints(*k, *lambda_max, &s)?,
        Command::Multimodal { k, lambda_max, arity } => cmd_multimodal(*k, *lambda_max, *arity, &s)?,
        Command::Fit { input, model, x, y } => {
            let text = std::fs::read_to_string(input)?;
            let model = match model {
                ModelArg::Linear => FitModel::Linear,
                ModelArg::Powerlaw => FitModel::PowerLaw,
            };
            cmd_fit(&text, model, x.as_deref(), y.as_deref())?
        }
        Command::Conjectures { orders } => {
            let (t, ok) = cmd_conjectures(&orders.resolve(None)?, &s)?;
            if !ok {
                code = EXIT_CONJECTURE;
            }
            t
        }
    };
    match &cli.common.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(cli.common.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(cli.common.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(code)
}
