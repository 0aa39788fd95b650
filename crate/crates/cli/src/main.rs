//! Experiment orchestration CLI for the random conductance laboratory.
//!
//! `rcmlab run <config.toml>` executes the configured experiment and writes
//! CSV + JSON-lines + a human-readable summary into the output directory.
//! Exit codes: 0 success, 2 pass-with-warnings (censored scale fields,
//! non-convergent moment estimates), 1 failure.

mod config;
mod experiments;
mod output;
mod plot;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use output::{config_hash, OutputDir};

#[derive(Parser)]
#[command(name = "rcmlab", version, about = "Degenerate random conductance laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Parse and validate a config without running anything.
    Validate { config: PathBuf },
    /// Sample the configured environment and write it in the binary format.
    EnvDump { config: PathBuf },
    /// Emit plot-ready per-figure CSVs from a results directory.
    Plot { results_dir: PathBuf },
}

fn load_config(path: &PathBuf) -> anyhow::Result<(ExperimentConfig, String)> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let config = ExperimentConfig::parse(&raw)?;
    Ok((config, raw))
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Validate { config } => {
            let (parsed, _) = load_config(&config)?;
            println!(
                "OK: {} experiment on d={} L={} ({} samples)",
                parsed.experiment.kind.name(),
                parsed.env.dimension,
                parsed.env.box_side,
                parsed.ensemble.n_samples
            );
            Ok(0)
        }
        Command::EnvDump { config } => {
            let (parsed, raw) = load_config(&config)?;
            let out = OutputDir::create(&parsed.experiment.output_dir, &config_hash(&raw))?;
            let message = experiments::env_dump(&parsed, &out)?;
            println!("{message}");
            Ok(0)
        }
        Command::Plot { results_dir } => {
            let emitted = plot::emit_plot_data(&results_dir)?;
            for name in &emitted {
                println!("wrote {}", results_dir.join(name).display());
            }
            Ok(0)
        }
        Command::Run { config } => {
            let started = Instant::now();
            let (parsed, raw) = load_config(&config)?;
            let hash = config_hash(&raw);
            let out = OutputDir::create(&parsed.experiment.output_dir, &hash)?;
            let outcome = experiments::run(&parsed, &out)?;

            let stamp = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let mut summary = String::new();
            summary.push_str(&format!(
                "experiment: {}\nconfig_hash: {hash}\nfinished_unix: {stamp}\nwall_seconds: {:.3}\n\n",
                parsed.experiment.kind.name(),
                started.elapsed().as_secs_f64()
            ));
            summary.push_str(&outcome.summary);
            if !outcome.warnings.is_empty() {
                summary.push_str("\nwarnings:\n");
                for w in &outcome.warnings {
                    summary.push_str(&format!("  - {w}\n"));
                }
            }
            out.write_summary(&summary)?;
            print!("{summary}");

            if outcome.warnings.is_empty() {
                Ok(0)
            } else {
                Ok(2)
            }
        }
    }
}
