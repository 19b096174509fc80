//! Batch front-end for the dimer simulation pipelines.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::Figure;
pub use config::{Format, RunConfig};
pub use error::{CliError, ErrorKind};
pub use experiment::{ingest_experiment, parse_experiment, ExperimentRow, ExperimentTable};
pub use output::{Manifest, Output};

#[derive(Debug, Parser)]
#[command(name = "dimer", version, about = "Spin-dimer correlation functions and dynamical structure factors")]
pub struct Cli {
    /// JSON run configuration; every block is optional.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides estimator.seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides output.dir.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides output.format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Eigenvalues, eigenvector labels and Lehmann terms.
    ExactSpectrum,
    /// Trotterized correlators and the Trotter error per step.
    TrotterSim,
    /// Train REFF parameters for one Trotter step.
    ReffTrain,
    /// Correlation series and power spectra with the configured method.
    Correlate,
    /// Correlators, structure factor and intensity spectrum.
    Dsf,
    /// Simulated sigma^x peak against an experimental table.
    CompareExperiment,
    /// Frozen figure recipes.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::ExactSpectrum => "exact-spectrum".into(),
            Command::TrotterSim => "trotter-sim".into(),
            Command::ReffTrain => "reff-train".into(),
            Command::Correlate => "correlate".into(),
            Command::Dsf => "dsf".into(),
            Command::CompareExperiment => "compare-experiment".into(),
            Command::Reproduce { figure } => {
                let f = clap::ValueEnum::to_possible_value(figure).expect("figure names");
                format!("reproduce {}", f.get_name())
            }
        }
    }
}

/// Loads the configuration and applies command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.estimator.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output.dir = dir.clone();
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one subcommand and writes its manifest.
pub fn run(cli: &Cli) -> Result<Manifest, CliError> {
    let cfg = resolve_config(cli)?;
    let job = || execute(cli.command, &cfg);
    match cli.threads {
        Some(0) => Err(CliError::config("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?
            .install(job),
        None => job(),
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Manifest, CliError> {
    let mut out = Output::new(&command.name(), cfg)?;
    match command {
        Command::ExactSpectrum => commands::exact_spectrum(cfg, &mut out)?,
        Command::TrotterSim => commands::trotter_sim(cfg, &mut out)?,
        Command::ReffTrain => commands::reff_train(cfg, &mut out)?,
        Command::Correlate => {
            commands::correlate(cfg, &mut out)?;
        }
        Command::Dsf => commands::dsf(cfg, &mut out)?,
        Command::CompareExperiment => commands::compare_experiment(cfg, &mut out)?,
        Command::Reproduce { figure } => commands::reproduce(cfg, figure, &mut out)?,
    }
    out.finish()
}
