//! `shadowcal`: calibrate, query and simulate log-normal shadowing models
//! from the command line.
//!
//! Exit codes: 0 on success, 1 for bad input or data, 2 when a numerical
//! routine fails (singular system, degenerate regression).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod source;

#[derive(Parser)]
#[command(
    name = "shadowcal",
    version,
    about = "Log-normal shadowing calibration toolkit"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Intercept {
    Free,
    Anchored,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    SampleSd,
    ResidualY,
}

#[derive(Args)]
pub struct RegressionArgs {
    /// Reference distance d0 in metres.
    #[arg(long, default_value_t = 1.0)]
    pub d0: f64,
    /// Estimate the reference RSS (free) or pin it to the row nearest d0.
    #[arg(long, value_enum, default_value_t = Intercept::Free)]
    pub intercept: Intercept,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the path-loss exponent by linear regression on log distance.
    Fit {
        /// Embedded dataset name, stats CSV or raw survey CSV.
        source: String,
        #[command(flatten)]
        regression: RegressionArgs,
        /// Show published values beside the computed ones.
        #[arg(long)]
        compare_paper: bool,
        /// Write `distance_m,fitted,observed` CSV for plotting.
        #[arg(long, value_name = "FILE")]
        emit_curve: Option<PathBuf>,
    },
    /// Fit the quartic shadowing standard deviation sigma(d).
    SigmaFit {
        source: String,
        #[arg(long, value_enum, default_value_t = Target::SampleSd)]
        target: Target,
        #[command(flatten)]
        regression: RegressionArgs,
        #[arg(long)]
        compare_paper: bool,
        #[arg(long, value_name = "FILE")]
        emit_curve: Option<PathBuf>,
    },
    /// Fit exponent and sigma(d) together and save a model document.
    Calibrate {
        source: String,
        #[arg(long, value_enum, default_value_t = Target::SampleSd)]
        target: Target,
        #[command(flatten)]
        regression: RegressionArgs,
        /// Model document to write; printed to stdout when omitted.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Mean RSS and sigma at one or more distances.
    Predict {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Distance in metres; repeat or comma-separate for several.
        #[arg(
            long = "d",
            required = true,
            value_delimiter = ',',
            allow_negative_numbers = true
        )]
        distances: Vec<f64>,
    },
    /// Distance estimate and confidence interval for a measured RSS.
    Localize {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Measured RSS in dBm.
        #[arg(long, allow_negative_numbers = true)]
        rss: f64,
        /// Two-sided confidence level.
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Maximum link range for a receiver sensitivity and fade margin.
    Plan {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Receiver sensitivity in dBm.
        #[arg(long, default_value_t = shadowcal::domain::DEFAULT_RECEIVER_SENSITIVITY_DBM, allow_negative_numbers = true)]
        sensitivity: f64,
        /// Fade-margin multiplier on sigma.
        #[arg(
            long,
            default_value_t = 0.0,
            conflicts_with = "outage",
            allow_negative_numbers = true
        )]
        z: f64,
        /// Target outage probability; sets z from the normal quantile.
        #[arg(long)]
        outage: Option<f64>,
    },
    /// Generate a reproducible synthetic RSSI survey.
    Simulate {
        /// Model document to sample from.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["eta", "rss_d0", "sigma"])]
        model: Option<PathBuf>,
        #[arg(long, required_unless_present = "model", allow_negative_numbers = true)]
        eta: Option<f64>,
        #[arg(long, required_unless_present = "model", allow_negative_numbers = true)]
        rss_d0: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        d0: f64,
        /// Constant sigma in dB.
        #[arg(long)]
        sigma: Option<f64>,
        /// Comma-separated distances in metres (default 1..20).
        #[arg(long, value_delimiter = ',')]
        distances: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Embedded reference surveys.
    Datasets {
        #[command(subcommand)]
        action: DatasetAction,
    },
}

#[derive(Subcommand)]
enum DatasetAction {
    /// List the embedded datasets.
    List,
    /// Write a dataset's per-distance statistics as canonical CSV.
    Export {
        name: String,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Write the model document built from a dataset's published fit.
    Model {
        name: String,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<commands::Outcome> {
    let fmt = cli.format;
    match cli.command {
        Command::Fit {
            source,
            regression,
            compare_paper,
            emit_curve,
        } => commands::fit(fmt, &source, &regression, compare_paper, emit_curve),
        Command::SigmaFit {
            source,
            target,
            regression,
            compare_paper,
            emit_curve,
        } => commands::sigma_fit(fmt, &source, target, &regression, compare_paper, emit_curve),
        Command::Calibrate {
            source,
            target,
            regression,
            output,
        } => commands::calibrate(fmt, &source, target, &regression, output),
        Command::Predict { model, distances } => commands::predict(fmt, &model, &distances),
        Command::Localize { model, rss, level } => commands::localize(fmt, &model, rss, level),
        Command::Plan {
            model,
            sensitivity,
            z,
            outage,
        } => commands::plan(fmt, &model, sensitivity, z, outage),
        Command::Simulate {
            model,
            eta,
            rss_d0,
            d0,
            sigma,
            distances,
            samples,
            seed,
            output,
        } => commands::simulate(
            fmt,
            commands::SimulateArgs {
                model,
                eta,
                rss_d0,
                d0,
                sigma,
                distances,
                samples,
                seed,
                output,
            },
        ),
        Command::Datasets { action } => match action {
            DatasetAction::List => commands::datasets_list(fmt),
            DatasetAction::Export { name, output } => commands::datasets_export(fmt, &name, output),
            DatasetAction::Model { name, output } => commands::datasets_model(fmt, &name, output),
        },
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<shadowcal::Error>())
        .any(shadowcal::Error::is_numerical);
    if numerical {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli).and_then(commands::Outcome::commit) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
