use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use precursor_cli::{run_file, RunOptions, ScenarioConfig};

#[derive(Parser)]
#[command(name = "precursors", version, about = "Collision-model revival and precursor analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its CSV artifacts.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long, env = precursor_cli::THREADS_ENV)]
        threads: Option<NonZeroUsize>,
    },
    /// Check a scenario without simulating it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are config errors here; 2 is reserved for numerics.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Validate { config } => ScenarioConfig::from_path(&config).map(|cfg| {
            println!(
                "valid: model {}, {} steps, window {}, levels {:?}",
                cfg.model,
                cfg.steps,
                cfg.capacity(),
                cfg.hierarchy_levels
            );
        }),
        Command::Run { config, output_dir, threads } => {
            run_file(&config, &RunOptions { output_dir, threads: threads.map(NonZeroUsize::get) }).map(|m| {
                println!(
                    "bound: {}, revivals: {}; wrote {} to {}",
                    m.run.bound_mode,
                    m.run.revival_count,
                    m.run.files.join(", "),
                    m.scenario.output_dir.display()
                );
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
