//! `strlab`: runs resonance experiments from JSON configs.
//!
//! Exit status: 0 when every verdict passes, 1 when a verdict fails, 2 on
//! usage or configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use strlab_core::experiments::{self, ExperimentConfig, ExperimentName, Outcome};
use strlab_core::Error;

#[derive(Debug, Parser)]
#[command(name = "strlab", version, about = "Space-time resonance experiments")]
struct Cli {
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: the config's output_dir, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract T, S and R for the configured phase.
    Resonances,
    /// Classify the resonant sets of one homogeneous phase.
    Classify,
    /// Integrate the configured quadratic problem.
    Simulate,
    /// Run one named experiment.
    Experiment {
        /// One of: wave_packet, resonant_growth, normal_form_check,
        /// vector_field_check, cutoff_decomposition, bilinear_strichartz,
        /// classification_suite.
        name: String,
    },
    /// Run every experiment with its defaults.
    Selftest,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| Path::new("out").join(name))
}

fn emit(outcome: &Outcome, dir: &Path) -> Result<bool, Error> {
    outcome.write_to(dir)?;
    println!("{}", outcome.report.summary_line());
    Ok(outcome.report.all_pass())
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Resonances => emit(&experiments::run_resonances(&cfg)?, &out_dir(cli, &cfg, "resonances")),
        Command::Classify => emit(&experiments::run_classify(&cfg)?, &out_dir(cli, &cfg, "classify")),
        Command::Simulate => emit(&experiments::run_simulate(&cfg)?, &out_dir(cli, &cfg, "simulate")),
        Command::Experiment { name } => {
            let name: ExperimentName = name.parse()?;
            if let Some(other) = cfg.experiment.filter(|n| *n != name) {
                return Err(Error::Config(format!("config is for {other}, not {name}")));
            }
            let outcome = experiments::run_named(name, &cfg)?;
            emit(&outcome, &out_dir(cli, &cfg, name.as_str()))
        }
        Command::Selftest => {
            let root = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let mut all = true;
            for name in ExperimentName::ALL {
                let mut each = ExperimentConfig::for_experiment(name);
                each.seed = cfg.seed;
                all &= emit(&experiments::run_named(name, &each)?, &root.join(name.as_str()))?;
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("strlab: {e}");
            ExitCode::from(2)
        }
    }
}
