use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spis_harness::{load_config, render, run_experiment, ExperimentConfig, Format, LoadError, SCENARIOS};

const EXIT_RUNTIME: u8 = 1;
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(name = "spis", version, about = "Saddle-point importance sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a bundled scenario.
    Run {
        config: String,
        /// Output file (default: the config's `output`, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: the config's `workers`, else all cores).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// List bundled scenarios.
    ListScenarios,
    /// Check a config without running it.
    Validate { config: String },
}

fn load(arg: &str) -> Result<spis_harness::ValidatedConfig, ExitCode> {
    load_config(arg).map_err(|e| {
        eprintln!("error: {e}");
        match e {
            LoadError::Io { .. } => ExitCode::from(EXIT_RUNTIME),
            LoadError::Config(_) => ExitCode::from(EXIT_INVALID),
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::ListScenarios => {
            for (name, text) in SCENARIOS {
                let desc = ExperimentConfig::from_toml(text)
                    .ok()
                    .and_then(|c| c.description)
                    .unwrap_or_default();
                println!("{name:<10} {desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(v) => {
                println!(
                    "{}: ok ({} methods, {} n values, {} draw counts)",
                    v.config.scenario,
                    v.config.methods.len(),
                    v.config.ns.len(),
                    v.config.draws.len()
                );
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run {
            config,
            out,
            workers,
            format,
        } => {
            if workers == Some(0) {
                eprintln!("error: --workers must be at least 1");
                return ExitCode::from(EXIT_INVALID);
            }
            let v = match load(&config) {
                Ok(v) => v,
                Err(code) => return code,
            };
            let rows = match run_experiment(&v, workers) {
                Ok(rows) => rows,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_RUNTIME);
                }
            };
            let text = render(&rows, format);
            let written = match out.or_else(|| v.config.output.clone()) {
                Some(path) => File::create(&path)
                    .and_then(|mut f| f.write_all(text.as_bytes()))
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_RUNTIME);
            }
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("error: {failed} of {} cells failed", rows.len());
                return ExitCode::from(EXIT_RUNTIME);
            }
            ExitCode::SUCCESS
        }
    }
}
