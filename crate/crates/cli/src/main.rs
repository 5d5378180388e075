//! `tabforge` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tabforge::report::{run_stages, summary, RunConfig, Stage};
use tabforge::tuning::{RegimeKind, ResampleMode};

#[derive(Parser)]
#[command(name = "tabforge", version, about = "Tabular binary classification pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and type-check the dataset; writes ingest.json.
    Ingest(Common),
    /// Ingest, impute, filter outliers, scan duplicates, normalize, encode.
    Preprocess(Common),
    /// Everything up to the feature vote; writes votes.csv and votes.json.
    SelectFeatures(Common),
    /// Everything up to evaluation under the configured regime.
    Evaluate(Common),
    /// The whole pipeline under the configured regime.
    RunAll(Common),
    /// The whole pipeline under all three regimes, plus comparison.csv.
    CompareRegimes(Common),
    /// Print the effective configuration as TOML.
    Config(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides TABFORGE_SEED and the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// full, no-cv or cv-only.
    #[arg(long)]
    regime: Option<RegimeKind>,
    /// fold-safe, pre-split or none.
    #[arg(long)]
    resample: Option<ResampleMode>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dataset CSV.
    #[arg(long)]
    data: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> tabforge::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        cfg.apply_seed_env()?;
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        if let Some(r) = self.regime {
            cfg.run.regime = r;
        }
        if let Some(r) = self.resample {
            cfg.run.resample = r;
        }
        if let Some(out) = &self.out {
            cfg.run.out_dir = out.clone();
        }
        if let Some(data) = &self.data {
            cfg.data.path = data.clone();
        }
        Ok(cfg)
    }
}

fn run(command: Command) -> tabforge::Result<()> {
    let (common, upto, all_regimes) = match &command {
        Command::Ingest(c) => (c, Stage::Ingest, false),
        Command::Preprocess(c) => (c, Stage::Preprocess, false),
        Command::SelectFeatures(c) => (c, Stage::SelectFeatures, false),
        Command::Evaluate(c) | Command::RunAll(c) => (c, Stage::Evaluate, false),
        Command::CompareRegimes(c) => (c, Stage::Evaluate, true),
        Command::Config(c) => {
            print!("{}", c.config()?.to_toml_string()?);
            return Ok(());
        }
    };
    let cfg = common.config()?;
    let regimes = if all_regimes {
        RegimeKind::ALL.to_vec()
    } else {
        vec![cfg.run.regime]
    };
    let bundle = run_stages(&cfg, upto, &regimes)?;
    print!("{}", summary(&bundle));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
