use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use conecheck::scenario::{self, eval_str, load_file, Options, Scenario, ScenarioError};

#[derive(Parser)]
#[command(name = "conecheck", version, about = "Check cohomology and Du Bois criteria on scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's pipeline and print the report.
    Verify {
        file: PathBuf,
        /// Sweep depth for the explicit part of vanishing certificates.
        #[arg(long)]
        nmax: Option<i64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Run only this pipeline step.
        #[arg(long)]
        check: Option<String>,
        /// Also print the certificate tree of this expression.
        #[arg(long)]
        explain: Option<String>,
    },
    /// Evaluate an expression against the scenario.
    Eval {
        file: PathBuf,
        expr: String,
        #[arg(long)]
        nmax: Option<i64>,
        /// Lower bound for the parameter `n`.
        #[arg(long, default_value_t = 1)]
        from: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate an expression and print its certificate tree.
    Explain {
        file: PathBuf,
        expr: String,
        #[arg(long)]
        nmax: Option<i64>,
        #[arg(long, default_value_t = 1)]
        from: i64,
    },
    /// Print the scenario in normalized form.
    Fmt { file: PathBuf },
}

/// Write to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn fail(file: &Path, e: &ScenarioError) -> ExitCode {
    eprintln!("error: {}:{e}", file.display());
    ExitCode::from(2)
}

fn load(file: &Path, nmax: Option<i64>) -> Result<Scenario, ExitCode> {
    let mut sc = load_file(file).map_err(|e| fail(file, &e))?;
    if let Some(n) = nmax {
        if n < 1 {
            eprintln!("error: --nmax must be at least 1");
            return Err(ExitCode::from(2));
        }
        sc.nmax = n;
    }
    Ok(sc)
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Verify { file, nmax, format, check, explain } => {
            let sc = load(&file, nmax)?;
            let report = scenario::verify(&sc, &Options { nmax, only: check }).map_err(|e| fail(&file, &e))?;
            match format {
                Format::Text => emit(&report.to_text()),
                Format::Json => emit(&format!("{}\n", report.to_json())),
            }
            if let Some(expr) = explain {
                let v = eval_str(&sc, &expr, 1).map_err(|e| fail(Path::new("<expr>"), &e))?;
                emit(&format!("\n{}", scenario::report::explain(&sc, &v)));
            }
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::Eval { file, expr, nmax, from, format } => {
            let sc = load(&file, nmax)?;
            let v = eval_str(&sc, &expr, from).map_err(|e| fail(Path::new("<expr>"), &e))?;
            match format {
                Format::Text => emit(&format!("{}\n", v.render(&sc))),
                Format::Json => emit(&format!("{}\n", v.to_json(&sc))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Explain { file, expr, nmax, from } => {
            let sc = load(&file, nmax)?;
            let v = eval_str(&sc, &expr, from).map_err(|e| fail(Path::new("<expr>"), &e))?;
            emit(&scenario::report::explain(&sc, &v));
            Ok(ExitCode::SUCCESS)
        }
        Command::Fmt { file } => {
            let sc = load(&file, None)?;
            emit(&sc.ast.to_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) | Err(code) => code,
    }
}
