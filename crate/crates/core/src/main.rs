use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shockstrip::pipeline::{self, exit_code};
use shockstrip::ExperimentConfig;

#[derive(Parser)]
#[command(name = "shockstrip", version, about = "Viscous shock waves: singularities, stability and analyticity strips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        config: PathBuf,
        /// Print the parsed configuration and exit.
        #[arg(long)]
        dry_run: bool,
        /// Output directory, overriding `out` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment per value of a numeric config key.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        values: String,
        #[arg(long)]
        dry_run: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, out: Option<PathBuf>) -> Result<ExperimentConfig, ExitCode> {
    match ExperimentConfig::from_file(path) {
        Ok(mut c) => {
            if let Some(o) = out {
                c.out = o;
            }
            Ok(c)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(exit_code(&e) as u8))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, dry_run, out } => {
            let cfg = match load(&config, out) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if dry_run {
                print!("{}", cfg.to_text());
                return ExitCode::SUCCESS;
            }
            match pipeline::run(&cfg) {
                Ok(report) => {
                    println!("y0 = {}", report.y0);
                    if let Some(op) = &report.operator {
                        println!("omega = {}", op.omega);
                    }
                    println!("verdict: {}", if report.verdict.passed() { "pass" } else { "fail" });
                    if let Some(p) = &report.picard {
                        println!("T* = {}, sigma_hat = {}", p.tstar, p.sigma_hat);
                    }
                    println!("outputs in {}", cfg.out.display());
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e) as u8)
                }
            }
        }
        Command::Sweep { config, axis, values, dry_run, out } => {
            let cfg = match load(&config, out) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let values: Vec<String> =
                values.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
            if dry_run {
                print!("{}", cfg.to_text());
                println!("# sweep {axis} over [{}]", values.join(", "));
                return ExitCode::SUCCESS;
            }
            match pipeline::sweep(&cfg, &axis, &values) {
                Ok(rows) => {
                    for r in &rows {
                        match &r.outcome {
                            Ok(rep) => println!("{axis}={}: y0 = {}, exit {}", r.value, rep.y0, r.exit_code()),
                            Err((code, msg)) => println!("{axis}={}: failed ({code}): {msg}", r.value),
                        }
                    }
                    if rows.iter().all(|r| r.exit_code() == 0) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e) as u8)
                }
            }
        }
    }
}
