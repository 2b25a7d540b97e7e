use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dho_cli::{catalog, execute, parse_scenario, CliError, Scenario};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "dho", version, about = "Gaussian moment dynamics of the damped quantum oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario documents.
    Run {
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        quiet: bool,
    },
    /// Parse and validate scenario documents without running them.
    Validate {
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
    },
    /// List model variants and their parameters.
    Catalog,
}

fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_scenario(&text, stem)
}

fn report(path: &Path, e: &CliError) {
    eprintln!("{}: {e}", path.display());
}

fn run(configs: &[PathBuf], out: &Path, jobs: usize, seed: u64, quiet: bool) -> i32 {
    let mut scenarios = Vec::new();
    let mut names = HashSet::new();
    for path in configs {
        match load(path) {
            Ok(sc) => {
                if !names.insert(sc.name.clone()) {
                    let e =
                        CliError::Validation { line: None, message: format!("duplicate scenario name '{}'", sc.name) };
                    report(path, &e);
                    return e.exit_code();
                }
                scenarios.push((path, sc));
            }
            Err(e) => {
                report(path, &e);
                return e.exit_code();
            }
        }
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return 3;
        }
    };
    let results: Vec<_> = pool.install(|| {
        scenarios.par_iter().map(|(_, sc)| execute(sc, seed).and_then(|o| o.write_to(out).map(|_| o))).collect()
    });
    let mut code = 0;
    for ((path, sc), r) in scenarios.iter().zip(results) {
        match r {
            Ok(o) => {
                if !quiet {
                    println!("{}: wrote {} file(s) to {}", sc.name, o.files.len(), out.join(&o.name).display());
                }
            }
            Err(e) => {
                report(path, &e);
                if code == 0 {
                    code = e.exit_code();
                }
            }
        }
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { configs, out, jobs, seed, quiet } => run(&configs, &out, jobs, seed, quiet),
        Command::Validate { configs } => {
            let mut code = 0;
            for path in &configs {
                match load(path) {
                    Ok(sc) => println!("{}: ok ({})", path.display(), sc.variant.kind().name()),
                    Err(e) => {
                        report(path, &e);
                        if code == 0 {
                            code = e.exit_code();
                        }
                    }
                }
            }
            code
        }
        Command::Catalog => {
            print!("{}", catalog::render());
            0
        }
    };
    ExitCode::from(code as u8)
}
