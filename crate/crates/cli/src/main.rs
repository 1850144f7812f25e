use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adhestring::cli_io::run::{output_root, run_experiments};
use adhestring::cli_io::{parse_config, run, ExitStatus};
use clap::{Parser, Subcommand};

/// Simulations of the adhesive string u_tt = u_xx - Φ'(u) on [0, L].
#[derive(Parser)]
#[command(name = "adhestring", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a config file and write its outputs.
    Run { config: PathBuf },
    /// Run a named scenario or limit study, or every name listed in a manifest file.
    ///
    /// Results go to `$ADHESTRING_OUT/<name>` (default `out/<name>`).
    Experiment { target: String },
    /// Parse and validate a config, then print its canonical form.
    Check { config: PathBuf },
}

fn read(path: &Path) -> Result<String, ExitStatus> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitStatus::Config
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ExitStatus::Config.code() as u8 } else { 0 });
        }
    };
    let status = match cli.command {
        Command::Run { config } => match read(&config).map(|t| parse_config(&t)) {
            Ok(Ok(cfg)) => run(&cfg),
            Ok(Err(e)) => {
                eprintln!("error: {}: {e}", config.display());
                ExitStatus::Config
            }
            Err(s) => s,
        },
        Command::Check { config } => match read(&config).map(|t| parse_config(&t)) {
            Ok(Ok(cfg)) => {
                print!("{}", cfg.serialize());
                ExitStatus::Success
            }
            Ok(Err(e)) => {
                eprintln!("error: {}: {e}", config.display());
                ExitStatus::Config
            }
            Err(s) => s,
        },
        Command::Experiment { target } => {
            let root = if std::env::var_os("ADHESTRING_OUT").is_some() { output_root(Path::new("")) } else { PathBuf::from("out") };
            match run_experiments(&target, &root) {
                Ok(outcomes) => {
                    for o in &outcomes {
                        println!("{}: {} ({}) -> {}", o.name, if o.passed { "pass" } else { "fail" }, o.summary, o.output_dir.display());
                    }
                    if outcomes.iter().all(|o| o.passed) {
                        ExitStatus::Success
                    } else {
                        ExitStatus::Diagnostic
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitStatus::from(&e)
                }
            }
        }
    };
    ExitCode::from(status.code() as u8)
}
