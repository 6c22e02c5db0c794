//! `pfdim`: runs counting sweeps, gap comparisons, measure experiments,
//! dividing and asymptotic-class checks, and the bundled reproduction
//! recipe. Reports go to stdout (or `--out`) as CSV or JSON.

mod commands;
mod random;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pfdim", version, about = "Definable-set counting experiments on finite structure families")]
pub struct Cli {
    /// Report format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub emit: Option<Emit>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps (reports do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for randomly generated inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

/// Where the structure comes from: a built-in family or a JSON file.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[arg(long, conflicts_with = "structure")]
    pub family: Option<String>,
    /// Structure file; the signature is read off the file.
    #[arg(long)]
    pub structure: Option<PathBuf>,
}

/// A set system from a file or generated at random.
#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// JSON set-system file.
    #[arg(long, conflicts_with = "random")]
    pub file: Option<PathBuf>,
    /// `M N EPS [SEED]`: N random sets over M uniform points, each of
    /// measure at least EPS. SEED defaults to `--seed`.
    #[arg(long, num_args = 3..=4, value_names = ["M", "N", "EPS", "SEED"])]
    pub random: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub slope_threshold: Option<f64>,
    #[arg(long)]
    pub divergence_threshold: Option<f64>,
    #[arg(long)]
    pub min_samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count the solutions of a formula in one structure.
    Count {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        index: Option<usize>,
        #[arg(long)]
        formula: String,
        /// Counted variables, comma-separated.
        #[arg(long, default_value = "x")]
        vars: String,
        /// Parameter scheme (family sources).
        #[arg(long, default_value = "none")]
        scheme: String,
        /// `name=element` parameter bindings (file sources).
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Count a formula along an index ladder.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "none")]
        scheme: String,
        /// `a:b`, `geo:a..b`, `primes:a..b` or a comma list.
        #[arg(long)]
        indices: String,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Compare the growth of two definable families.
    Gap {
        #[arg(long)]
        family: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "none")]
        scheme_x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "none")]
        scheme_y: String,
        #[arg(long)]
        indices: String,
        #[arg(long, default_value = "x")]
        var: String,
        #[command(flatten)]
        gap: GapArgs,
    },
    /// Truncated inclusion-exclusion tails of a set system.
    Inclexcl {
        #[command(flatten)]
        system: SystemArgs,
        /// First term of the tail; all starts when omitted.
        #[arg(long)]
        start: Option<usize>,
    },
    /// Search for a k-fold intersection of measure at least eps^(3^(k-1)).
    Intersect {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Lower bound on every set's measure (defaults to the generator's EPS).
        #[arg(long)]
        eps: Option<String>,
    },
    /// Dimension-drop report for a dividing formula, or the circular-order
    /// witness check with `--witness`.
    Dividing {
        #[arg(long)]
        family: String,
        #[arg(long)]
        baseline: Option<String>,
        #[arg(long, default_value = "none")]
        baseline_scheme: String,
        #[arg(long)]
        phi: Option<String>,
        /// Conjugate parameter schemes, comma-separated.
        #[arg(long)]
        schemes: Option<String>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        indices: String,
        #[arg(long, default_value_t = 0)]
        diagram_depth: usize,
        #[arg(long, default_value = "x")]
        var: String,
        /// Check the explicit witness sequence of the circular order instead.
        #[arg(long)]
        witness: bool,
        /// Witness sequence length; defaults to the largest permitted.
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        gap: GapArgs,
    },
    /// Check that a finite disjunction covers a target formula.
    Cover {
        #[arg(long)]
        family: String,
        #[arg(long)]
        index: usize,
        #[arg(long, default_value = "x = x")]
        target: String,
        #[arg(long = "disjunct")]
        disjuncts: Vec<String>,
        /// Use the circular-order cover of `x = x` by three arcs and their endpoints.
        #[arg(long = "disjuncts-paper-x-eq-x")]
        paper_cover: bool,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Fit bounded counts and measure clusters over all parameter tuples.
    Asymfit {
        #[arg(long)]
        family: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        indices: String,
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long)]
        c_bound: Option<u64>,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Sort one-variable definable sets into bounded or full dimension.
    Twovalue {
        #[arg(long)]
        family: String,
        /// `FORMULA@SCHEME`, repeatable; the scheme defaults to none.
        #[arg(long = "entry", required = true)]
        entries: Vec<String>,
        #[arg(long)]
        indices: String,
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long, default_value_t = 8)]
        c_bound: u64,
        #[command(flatten)]
        gap: GapArgs,
    },
    /// Run every bundled example and compare against the expected verdicts.
    Reproduce,
}

/// A rendered report and the number of failed expectations in it.
pub struct Output {
    pub text: String,
    pub mismatches: usize,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, mismatches: 0 }
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(CliError::runtime)?;
    }
    commands::dispatch(cli)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &out.text),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(3);
            }
            if out.mismatches > 0 {
                eprintln!("{} check(s) did not match the expected verdict", out.mismatches);
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
