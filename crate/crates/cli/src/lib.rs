//! Command-line front end for multiway correspondence analysis.
//!
//! ```text
//! mwca mwca    --input table.csv [--ranks full|r1,r2,..] [--plot] --out DIR
//! mwca ca      --mode K --input table.csv --out DIR
//! mwca compare --mode K --input table.csv --out DIR
//! mwca verify  (--input table.csv | --random ORDER SHAPE [--seed N])
//! ```
//!
//! Exit status is 0 on success, 1 for bad input or configuration and 2 when a
//! verification check fails.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod io;
pub mod plot;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{execute, parse_shape, Command, Outcome, Source};
use crate::config::{parse_algorithm, parse_axes, AnalysisConfig};
use crate::error::{CliError, Result};

#[derive(Parser, Debug)]
#[command(name = "mwca", version, about = "Multiway correspondence analysis of contingency tables")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Full MWCA pipeline: coordinates, spectra, report and optional biplot.
    Mwca(Common),
    /// Classical CA of the mode-k matricization.
    Ca {
        #[arg(long)]
        mode: usize,
        #[command(flatten)]
        common: Common,
    },
    /// MWCA and matricized CA side by side, with their relative error.
    Compare {
        #[arg(long)]
        mode: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check the component-link and barycentric identities.
    Verify {
        /// Seeded random input instead of a file, e.g. `--random 3 4x5x6`.
        #[arg(long, num_args = 2, value_names = ["ORDER", "SHAPE"], conflicts_with = "input")]
        random: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    input: Option<PathBuf>,
    /// long-csv or dense-json; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    /// JSON object mapping mode names to ordered labels.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value = "full")]
    ranks: String,
    /// hosvd, st-hosvd or hooi.
    #[arg(long, default_value = "hosvd")]
    algorithm: String,
    /// Mode for the CA comparison in `mwca` reports (default: last).
    #[arg(long)]
    ca_mode: Option<usize>,
    /// error or drop.
    #[arg(long, default_value = "error")]
    zero_slices: String,
    #[arg(long, default_value_t = mwca_core::verify::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Plotted components, 1-based.
    #[arg(long, default_value = "2,3")]
    axes: String,
    #[arg(long)]
    plot: bool,
    /// y, w or z.
    #[arg(long, default_value = "y")]
    plot_coords: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<AnalysisConfig> {
        Ok(AnalysisConfig {
            ranks: self.ranks.parse()?,
            algorithm: parse_algorithm(&self.algorithm)?,
            ca_mode: self.ca_mode,
            tolerance: self.tolerance,
            axes: parse_axes(&self.axes)?,
            zero_slices: self.zero_slices.parse()?,
            plot: self.plot,
            plot_coords: self.plot_coords.parse()?,
        })
    }

    fn source(&self) -> Result<Source> {
        let path = self
            .input
            .clone()
            .ok_or_else(|| CliError::Config("--input is required".into()))?;
        let format = self.format.as_deref().map(str::parse).transpose()?;
        Ok(Source::File {
            path,
            format,
            labels: self.labels.clone(),
        })
    }
}

fn dispatch(cmd: &Cmd) -> Result<(Outcome, Option<PathBuf>)> {
    let (command, common, source) = match cmd {
        Cmd::Mwca(c) => (Command::Mwca, c, c.source()?),
        Cmd::Ca { mode, common } => (Command::Ca { mode: *mode }, common, common.source()?),
        Cmd::Compare { mode, common } => (Command::Compare { mode: *mode }, common, common.source()?),
        Cmd::Verify { random, seed, common } => {
            let source = match random {
                Some(v) => Source::Random {
                    shape: parse_shape(&v[0], &v[1])?,
                    seed: *seed,
                },
                None => common.source()?,
            };
            (Command::Verify, common, source)
        }
    };
    let cfg = common.config()?;
    let outcome = execute(command, &source, &cfg)?;
    Ok((outcome, common.out.clone()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status. Diagnostics go to standard error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (outcome, out) = match dispatch(&cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match &out {
        Some(dir) => {
            if let Err(e) = outcome.write_to(dir) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        }
        None => print!("{}", outcome.report_json),
    }
    if outcome.verification_passed {
        0
    } else {
        let failed = outcome
            .report
            .verification
            .as_ref()
            .map(|v| {
                v.checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{} mode {}", c.check, c.mode))
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .unwrap_or_default();
        let e = CliError::Verification(failed);
        eprintln!("error: {e}");
        e.exit_code()
    }
}
