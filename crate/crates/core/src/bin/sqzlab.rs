use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use squeezed_control::lab::{run_experiment, ExperimentConfig};
use squeezed_control::oracles::verify_suite;

#[derive(Parser)]
#[command(
    name = "sqzlab",
    version,
    about = "Run squeezed-light SFG experiments from a JSON config"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (default: run.out_dir from the config, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override run.master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores). Output does not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Run the oracle suite first and abort if any check fails.
        #[arg(long)]
        verify: bool,
    },
    /// Run only the oracle suite.
    Verify,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn verify() -> bool {
    let mut ok = true;
    for check in verify_suite() {
        let tag = if check.passed { "ok  " } else { "FAIL" };
        eprintln!("[{tag}] {}: {}", check.name, check.detail);
        ok &= check.passed;
    }
    ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify => {
            if verify() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY)
            }
        }
        Command::Run {
            config,
            out,
            seed,
            threads,
            verify: pre_verify,
        } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if pre_verify && !verify() {
                eprintln!("error: verification failed, not running");
                return ExitCode::from(EXIT_VERIFY);
            }
            let out = out
                .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                pool = pool.num_threads(n);
            }
            let pool = match pool.build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: thread pool: {e}");
                    return ExitCode::from(EXIT_FAILURE);
                }
            };
            match pool.install(|| run_experiment(&cfg, &out)) {
                Ok(files) => {
                    for f in files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(if e.is_config() {
                        EXIT_CONFIG
                    } else {
                        EXIT_FAILURE
                    })
                }
            }
        }
    }
}
