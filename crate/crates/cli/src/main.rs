//! `rankdiff`: stationary samples, capital distribution curves, verification
//! scenarios and limiting formulas for rank-based particle systems.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Run;
use crate::config::{AsymptoticsConfig, Config};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "rankdiff", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw weight sequences; write weights.csv and summary.json.
    Sample(Common),
    /// Log-log rank/weight curve; write curve.csv and curve.json.
    CapitalCurve(Common),
    /// Run the configured verification scenarios; exit 1 on any failed verdict.
    Verify(Common),
    /// Print limiting max-weight moments, D_p and entropy for 0 < eta < 1/2.
    Asymptotics {
        #[command(flatten)]
        common: OptionalConfig,
        /// Overrides `[asymptotics] eta`.
        #[arg(long)]
        eta: Option<f64>,
        /// Overrides `[asymptotics] p` (comma-separated).
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Overrides `[asymptotics] tol`.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct OptionalConfig {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct Shared {
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "RANKDIFF_THREADS")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_pool(threads: Option<usize>) -> Result<(), CliError> {
    let Some(threads) = threads else {
        return Ok(());
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))
}

fn prepare(common: Common) -> Result<Run, CliError> {
    init_pool(common.shared.threads)?;
    let config = Config::load(&common.config)?;
    Ok(Run {
        config,
        config_path: common.config.display().to_string(),
        seed_override: common.shared.seed,
        out: common.shared.out.unwrap_or_else(|| PathBuf::from(".")),
    })
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Sample(common) => commands::sample(&prepare(common)?),
        Command::CapitalCurve(common) => commands::capital_curve(&prepare(common)?),
        Command::Verify(common) => commands::verify(&prepare(common)?),
        Command::Asymptotics {
            common,
            eta,
            p,
            tol,
        } => {
            init_pool(common.shared.threads)?;
            let mut settings = match &common.config {
                Some(path) => Config::load(path)?.asymptotics.unwrap_or_default(),
                None => AsymptoticsConfig::default(),
            };
            settings.eta = eta.or(settings.eta);
            if let Some(p) = p {
                settings.p = p;
            }
            if let Some(tol) = tol {
                settings.tol = tol;
            }
            if !(settings.tol > 0.0 && settings.tol.is_finite()) {
                return Err(CliError::Usage(format!(
                    "--tol must be positive, got {}",
                    settings.tol
                )));
            }
            if let Some(p) = settings.p.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
                return Err(CliError::Usage(format!(
                    "every p must be positive, got {p}"
                )));
            }
            commands::asymptotics(&settings, common.shared.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
