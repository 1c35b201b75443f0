//! `eqr`: quantile regression in the tails from the command line.
//!
//! Subcommands:
//!   fit        exact check-loss fit of a dataset CSV, written as JSON
//!   limit-sim  simulate the extreme-order limit law, written as CSV
//!   tail-index spacings-based tail report, written as JSON
//!   mc-qq      Monte Carlo QQ comparison table, written as CSV
//!
//! Exit codes: 0 success, 1 domain/regime errors, 2 I/O or config errors.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use extremal_qr::error::Error;
use extremal_qr::extreme::{sample_limit_distribution, write_limit_samples_csv};
use extremal_qr::harness::io::read_dataset_path;
use extremal_qr::harness::{run_qq_experiment, write_qq_csv, ExperimentConfig, LimitSimConfig};
use extremal_qr::qr;
use extremal_qr::tail_index::tail_report;

#[derive(Parser)]
#[command(name = "eqr", version, about = "Extremal quantile regression toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArg {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a regression quantile on a dataset CSV (header y,x1,...).
    Fit {
        /// Dataset CSV path.
        #[arg(long)]
        data: PathBuf,
        /// Quantile level in (0,1).
        #[arg(long)]
        tau: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sample the extreme-order limit law Z(k) and write one draw per row.
    LimitSim {
        /// JSON config with model, design and optional heterogeneity index.
        #[arg(long)]
        config: PathBuf,
        /// Extreme-order index k > 0 (overrides the config).
        #[arg(long)]
        k: Option<f64>,
        /// Replication count (overrides the config).
        #[arg(long)]
        reps: Option<usize>,
        /// Stream seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Estimate the tail index and heterogeneity from quantile spacings.
    TailIndex {
        /// Dataset CSV path.
        #[arg(long)]
        data: PathBuf,
        /// Base level; defaults to tau with tau*T = T^0.7.
        #[arg(long)]
        tau: Option<f64>,
        /// Level multiplier l (default 2).
        #[arg(long, default_value_t = 2.0)]
        l: f64,
        /// Spacing multiplier m (default 2).
        #[arg(long, default_value_t = 2.0)]
        m: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the Monte Carlo QQ experiment from a JSON config.
    McQq {
        /// Experiment config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Replication count (overrides the config).
        #[arg(long)]
        reps: Option<usize>,
        /// Stream seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
}

fn open_sink(out: &OutArg) -> Result<Box<dyn Write>, Error> {
    match &out.out {
        Some(path) => Ok(Box::new(File::create(path)?)),
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Fit { data, tau, out } => {
            let ds = read_dataset_path(&data)?;
            let fit = qr::fit(&ds, tau)?;
            let mut sink = open_sink(&out)?;
            serde_json::to_writer_pretty(&mut sink, &fit)?;
            writeln!(sink)?;
            Ok(())
        }
        Command::LimitSim {
            config,
            k,
            reps,
            seed,
            out,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg: LimitSimConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let model = cfg.model.to_model()?;
            let profile = cfg.profile()?;
            let k = k
                .or(cfg.k)
                .ok_or_else(|| Error::Config("k missing (flag or config)".into()))?;
            let reps = reps.or(cfg.reps).unwrap_or(2000);
            let seed = seed.or(cfg.seed).unwrap_or(0);
            let draws = sample_limit_distribution(&model, &profile, &cfg.design, k, reps, seed)?;
            write_limit_samples_csv(open_sink(&out)?, &draws)
        }
        Command::TailIndex {
            data,
            tau,
            l,
            m,
            out,
        } => {
            let ds = read_dataset_path(&data)?;
            let report = tail_report(&ds, tau, l, m, &[ds.xbar()])?;
            let mut sink = open_sink(&out)?;
            serde_json::to_writer_pretty(&mut sink, &report)?;
            writeln!(sink)?;
            Ok(())
        }
        Command::McQq {
            config,
            reps,
            seed,
            out,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            if let Some(r) = reps {
                cfg.r = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let table = run_qq_experiment(&cfg)?;
            let sink: Box<dyn Write> = match (&out.out, &cfg.output_path) {
                (Some(path), _) => Box::new(File::create(path)?),
                (None, Some(path)) => Box::new(File::create(path)?),
                (None, None) => Box::new(std::io::stdout()),
            };
            write_qq_csv(sink, &table)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io_or_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
