use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vlcsim_cli::config::keys_help;
use vlcsim_cli::validate::{run_validation, Hooks};
use vlcsim_cli::{run, Config, Experiment};

#[derive(Parser)]
#[command(name = "vlcsim", version, about = "Filterless multi-color LED VLC simulator", after_long_help = keys_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in invariant suite.
    Validate {
        /// Perturb one transform entry so the diagonalization check fails.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Run an experiment and write CSV and JSON results.
    #[command(after_long_help = keys_help())]
    Run {
        /// TOML config file.
        config: PathBuf,
        experiment: Experiment,
        /// Overrides `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { inject_fault } => {
            let summary = run_validation(Hooks {
                perturb_transform: inject_fault,
            });
            for c in &summary.checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            println!(
                "{}",
                serde_json::to_string(&summary).expect("summary serializes")
            );
            if summary.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Run {
            config,
            experiment,
            seed,
            out,
            threads,
        } => {
            let mut cfg = match Config::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
            let pool = match rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
            {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match pool.install(|| run(&cfg, experiment, &dir)) {
                Ok(out) => {
                    for line in &out.lines {
                        println!("{line}");
                    }
                    for f in &out.files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
