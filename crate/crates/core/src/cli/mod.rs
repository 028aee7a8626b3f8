//! Batch command-line front end.
//!
//! Every subcommand validates its parameters, runs one experiment, prints a
//! short summary and writes `<stem>.csv` / `<stem>.json` (and `<stem>.svg`
//! with `--plot`) to the output directory. Exit codes: 0 success,
//! 1 invalid input, 2 numerical failure (non-convergence, truncation, failed
//! self-check) or unwritable output.

mod commands;
mod output;
mod plot;
mod range;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use output::{experiment_id, Cell, Fields, Format, Meta, ResultRecord, Results};
pub use range::RangeSpec;

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lab(#[from] Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lab(e) if e.is_validation() => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fock-lab", version, about = "Experiments with Fock-kernel operators on Gaussian L^p spaces")]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for CSV/JSON/SVG output.
    #[arg(long, env = "FOCK_LAB_OUT_DIR", default_value = ".", global = true)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both, global = true)]
    pub format: Format,
    /// Also write an SVG plot (norm-estimate, threshold-scan, lemma13-limit).
    #[arg(long, global = true)]
    pub plot: bool,
    /// File stem for the outputs; defaults to the subcommand name.
    #[arg(long, global = true)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// `e^{-y}`
    Exp,
    /// `y e^{-y}`
    YExp,
    /// indicator of `[0, 1]`
    Indicator,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gaussian monomial moments: quadrature against the closed form.
    Moments {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0, 4.0])]
        p: Vec<f64>,
        /// Largest total degree (n = 1).
        #[arg(long, default_value_t = 6)]
        max_order: u32,
        /// Largest degree per coordinate (n = 2).
        #[arg(long, default_value_t = 3)]
        max_entry: u32,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Reproducing formula residuals for monomials at random points.
    VerifyReproducing {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        degree: u32,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Points are drawn uniformly from the ball of this radius.
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Schur-test certificate (Fubini bound for p = 1) at pt = 2s.
    SchurBound {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Radii of the sample points on the first axis.
        #[arg(long, default_value = "0:8:9")]
        radii: RangeSpec,
    },
    /// Upper and lower bounds for the norm of T_t at pt = 2s.
    NormEstimate {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Values of eps for f_eps; defaults to t * (5e-2 .. 5e-4), 5 log-spaced.
        #[arg(long)]
        eps_range: Option<RangeSpec>,
        /// Truncation of the radial operator; defaults to 1e4 / t.
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        nodes: usize,
        /// Also run power iteration (p = 2 only).
        #[arg(long)]
        power_iteration: bool,
        /// Truncation for power iteration; defaults to 800 / t.
        #[arg(long)]
        pi_x_max: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        pi_nodes: usize,
    },
    /// Classify boundedness over a (t, s) grid.
    ThresholdScan {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        t_range: RangeSpec,
        #[arg(long)]
        s_range: RangeSpec,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// The double-integral limit (2 sqrt(2 pi))^p by extrapolation in h.
    Lemma13Limit {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value = "1e-2:1e-4:3:log")]
        h_range: RangeSpec,
    },
    /// Reduce S_{a,b} on L^p(dv_s) to S_{t'} on L^p(dv_{s'}) and classify.
    ReduceAb {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Planar T_t against the radial operator A for radial inputs.
    RadialCheck {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Profile::Exp)]
        profile: Profile,
        #[arg(long, default_value = "0.3:3:10")]
        radii: RangeSpec,
        /// Truncation of A; defaults to 400 / t.
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moments { .. } => "moments",
            Command::VerifyReproducing { .. } => "verify-reproducing",
            Command::SchurBound { .. } => "schur-bound",
            Command::NormEstimate { .. } => "norm-estimate",
            Command::ThresholdScan { .. } => "threshold-scan",
            Command::Lemma13Limit { .. } => "lemma13-limit",
            Command::ReduceAb { .. } => "reduce-ab",
            Command::RadialCheck { .. } => "radial-check",
        }
    }
}

/// Parse `argv` (program name first), run the command and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let outcome = commands::dispatch(&cli.command)?;
    let sink = output::Sink {
        dir: cli.output.out_dir.clone(),
        stem: cli.output.name.clone().unwrap_or_else(|| cli.command.name().to_string()),
        format: cli.output.format,
        plot: cli.output.plot,
    };
    let record = ResultRecord::new(cli.command.name(), outcome.inputs, outcome.results);
    for line in &outcome.report {
        println!("{line}");
    }
    for path in sink.write(&record, outcome.svg)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_failures_exit_one() {
        assert_eq!(run(["fock-lab", "no-such-command"]), 1);
        assert_eq!(run(["fock-lab", "schur-bound", "--p", "x", "--t", "1", "--s", "1"]), 1);
        assert_eq!(run(["fock-lab", "threshold-scan", "--p", "2", "--t-range", "1:2", "--s-range", "1:2:3"]), 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["fock-lab", "--help"]), 0);
        assert_eq!(run(["fock-lab", "--version"]), 0);
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(CliError::from(Error::InvalidParameter("x".into())).exit_code(), 1);
        assert_eq!(
            CliError::from(Error::NotConverged { iterations: 1, last_change: 1.0 }).exit_code(),
            2
        );
        assert_eq!(CliError::from(Error::Truncation("x".into())).exit_code(), 2);
    }
}
