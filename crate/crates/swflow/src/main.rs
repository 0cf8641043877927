use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swflow::config::ExperimentConfig;
use swflow::{run, CliError};

#[derive(Parser)]
#[command(name = "swflow", version, about = "Lattice Seiberg-Witten experiments on conformally flat 4-tori")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the task described by a TOML config.
    Run {
        config: PathBuf,
        /// Override the output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Parse and check a config without running it.
    Validate { config: PathBuf },
    /// Run every case in a regression directory.
    Regress { dir: PathBuf },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.verb {
        Verb::Run { config, output } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            let out = run::run(&cfg)?;
            for f in &out.files {
                println!("{}", f.display());
            }
        }
        Verb::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            println!("ok {} {}", cfg.task.name(), cfg.hash());
        }
        Verb::Regress { dir } => {
            let cases = run::regress(&dir)?;
            let mut failed = Vec::new();
            for c in &cases {
                println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                if !c.passed {
                    failed.push(c.name.clone());
                }
            }
            if !failed.is_empty() {
                return Err(CliError::Regression(failed.join(", ")));
            }
        }
    }
    Ok(())
}
