use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use geophase_cli::{parse_config, run, ExperimentConfig, Kind, RunOptions};

#[derive(Parser)]
#[command(
    name = "geophase",
    version,
    about = "Geometric phase experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV table.
    Run {
        config: PathBuf,
        /// Output file; defaults to the config's `output` (relative to the
        /// config file) or stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leave the timestamp metadata line out.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Check a config and list every problem found.
    Validate { config: PathBuf },
    /// List the experiment kinds.
    ListKinds,
}

fn load(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_config(&text).with_context(|| format!("invalid config {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> anyhow::Result<()> {
    match command {
        Command::ListKinds => {
            for k in Kind::ALL {
                println!("{:<14} {}", k.name(), k.summary());
            }
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!(
                "{}: valid {} config (digest {})",
                config.display(),
                cfg.kind,
                cfg.digest
            );
        }
        Command::Run {
            config,
            out,
            no_timestamp,
        } => {
            let cfg = load(&config)?;
            let table = run(
                &cfg,
                RunOptions {
                    timestamp: !no_timestamp,
                },
            )?;
            for (k, v) in &table.metadata {
                if k == "warning" {
                    eprintln!("warning: {v}");
                }
            }
            let target = out.or_else(|| {
                cfg.output
                    .as_ref()
                    .map(|o| config.parent().map_or_else(|| o.clone(), |dir| dir.join(o)))
            });
            match target {
                Some(path) => table.emit(&path)?,
                None => print!("{}", table.to_csv()?),
            }
        }
    }
    Ok(())
}
