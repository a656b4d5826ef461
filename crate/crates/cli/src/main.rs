//! `gaugekit` command-line front end.
//!
//! Every run prints one report wrapped as `{command, config, report}`. Exit
//! codes: 0 success or consistent, 2 refuted, 3 input error, 4 budget
//! exhausted.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::json;

use gaugekit::{Error, Result};

use commands::Command;
use output::{Envelope, Format};

const SEED_ENV: &str = "GAUGEKIT_SEED";
const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Serialize)]
#[command(name = "gaugekit", version, about = "Gauge integrals, charges and dyadic figures")]
struct Cli {
    /// Random seed; beats GAUGEKIT_SEED, which beats the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with run defaults (currently `seed`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for harness trials; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
}

fn resolve_seed(cli: &Cli) -> Result<(u64, &'static str)> {
    if let Some(s) = cli.seed {
        return Ok((s, "flag"));
    }
    if let Ok(v) = std::env::var(SEED_ENV) {
        let s = v.trim().parse().map_err(|_| Error::Input(format!("{SEED_ENV}: `{v}` is not a 64-bit seed")))?;
        return Ok((s, "env"));
    }
    let file = match &cli.config {
        Some(p) => input::read_json::<FileConfig>(p)?,
        None => FileConfig::default(),
    };
    Ok(match file.seed {
        Some(s) => (s, "config"),
        None => (DEFAULT_SEED, "default"),
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } | Error::DepthExhausted { .. } | Error::NoStabilization { .. } => 4,
        _ => 3,
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let (seed, seed_source) = resolve_seed(cli)?;
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| Error::Input(format!("--jobs: {e}")))?;
    }
    let name = cli.command.name();
    let config = json!({
        "seed": seed,
        "seed_source": seed_source,
        "jobs": cli.jobs,
        "format": cli.format,
        "args": serde_json::to_value(&cli.command).map_err(|e| Error::Input(e.to_string()))?,
    });
    let outcome = cli.command.run(seed)?;
    let bytes = output::render(&Envelope { command: name, config: &config, report: &outcome.report }, cli.format)?;
    output::emit(&bytes, cli.output.as_deref())?;
    Ok(if outcome.refuted { 2 } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gaugekit: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
