use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semiclass_lab::harness::{load_config, run_batch, ExperimentName};
use semiclass_lab::LabError;

#[derive(Parser)]
#[command(name = "semiclass-lab", version, about = "Run semiclassical commutator and energy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config file.
    Run {
        config: PathBuf,
        /// Output root; each experiment writes into its own subdirectory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Experiments run concurrently up to this many threads.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Replace the grid size of every experiment.
        #[arg(long)]
        n_override: Option<usize>,
    },
    /// List the available experiments.
    List,
}

fn run(config: PathBuf, out: PathBuf, workers: usize, n_override: Option<usize>) -> Result<u8, LabError> {
    let mut cfgs = load_config(&config)?;
    if let Some(n) = n_override {
        cfgs.iter_mut().for_each(|c| c.grid.n = n);
    }
    let results = run_batch(&cfgs, Some(&out), workers)?;
    let (mut failed, mut config_error, mut numerical) = (false, false, false);
    for (cfg, r) in cfgs.iter().zip(results) {
        match r {
            Ok(rep) => {
                println!(
                    "{:<20} {}  {:>8.2}s  {}",
                    cfg.output_subdir(),
                    if rep.passed { "PASS" } else { "FAIL" },
                    rep.runtime_seconds,
                    &rep.inputs_digest[..16]
                );
                for c in rep.criteria.iter().filter(|c| !c.passed) {
                    println!("    failed {}: measured {:.6e}, threshold {:.6e} {}", c.name, c.measured, c.threshold, c.detail);
                }
                failed |= !rep.passed;
            }
            Err(e) => {
                eprintln!("[{}] error: {e}", cfg.name.as_str());
                println!("{:<20} ERROR {e}", cfg.output_subdir());
                match e.exit_code() {
                    3 => config_error = true,
                    _ => numerical = true,
                }
            }
        }
    }
    // Config errors outrank numerical aborts, which outrank failed verdicts.
    Ok(if config_error {
        3
    } else if numerical {
        4
    } else if failed {
        2
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in ExperimentName::ALL {
                println!("{:<20} {}", name.as_str(), name.summary());
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out, workers, n_override } => match run(config, out, workers, n_override) {
            Ok(code) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
