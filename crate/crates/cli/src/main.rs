use clap::Parser;
use hypext_cli::config::{RunConfig, Task};
use std::path::PathBuf;
use std::process::ExitCode;

/// Extension operators, scattering matrices and Eisenstein series for
/// Schottky groups.
#[derive(Parser, Debug)]
#[command(name = "hypext", version)]
struct Args {
    /// Task to run; defaults to the config's `task`.
    #[arg(value_enum)]
    task: Option<Task>,
    /// Path of the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving the CSV artifacts.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads (overrides the config's `threads`).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            return ExitCode::FAILURE;
        }
    };
    if let Some(n) = args.threads.or(cfg.threads) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    match hypext_cli::run(&cfg, args.task, &args.out_dir) {
        Ok(outcome) => {
            print!("{}", hypext_cli::summary_text(&outcome));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::FAILURE
        }
    }
}
