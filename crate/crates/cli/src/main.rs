use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use trischmidt::format::to_json;
use trischmidt::{commands, exit, CliError, GenKind, Report, Settings};

/// Tripartite Schmidt decomposition analysis for pure states.
#[derive(Debug, Parser)]
#[command(name = "trischmidt", version)]
struct Cli {
    /// Relative threshold below which singular values and eigenvalues count as zero.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_rank: f64,
    /// Relative gap below which two eigenvalues count as equal.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_degen: f64,
    /// Absolute tolerance for normalization and reconstruction checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_recon: f64,
    /// Seed for the `haar` and `schmidt` generators.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also run the test with every party as pivot (equal dimensions only).
    #[arg(long, global = true)]
    all_pivots: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a state file.
    Gen {
        kind: GenKind,
        /// Party dimensions, e.g. 2,2,2.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Schmidt weights for `schmidt`; rescaled to sum to one.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Output path; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether each tripartite state has a Schmidt decomposition.
    Check {
        /// State files; `-` reads standard input.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Reduced-density-matrix spectra and their equality flags.
    Spectra { file: PathBuf },
    /// Schmidt coefficients, bases and entropy of a bipartite state.
    DecomposeBipartite { file: PathBuf },
}

fn read_input(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let result = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text))
    };
    result.map_err(|source| CliError::Input { path: path.to_path_buf(), source })?;
    Ok(text)
}

fn context(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(to_json(value).as_bytes())?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
#[serde(untagged)]
enum BatchEntry {
    Report { file: String, exit_code: u8, report: Box<Report> },
    Error { file: String, exit_code: u8, error: String },
}

fn check_one(path: &Path, settings: &Settings) -> Result<(Report, u8), CliError> {
    let text = read_input(path)?;
    commands::check(&text, &context(path), settings)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let settings = Settings::new(cli.tol_rank, cli.tol_degen, cli.tol_recon, cli.seed, cli.all_pivots)?;
    match cli.command {
        Command::Gen { kind, dims, weights, output } => {
            let file = commands::gen(kind, &dims, weights.as_deref(), settings.seed)?;
            match output {
                Some(path) => std::fs::write(path, to_json(&file))?,
                None => emit(&file)?,
            }
            Ok(exit::DECOMPOSABLE)
        }
        Command::Check { files } if files.len() == 1 => {
            let (report, code) = check_one(&files[0], &settings)?;
            emit(&report)?;
            Ok(code)
        }
        Command::Check { files } => {
            let entries: Vec<BatchEntry> = files
                .par_iter()
                .map(|path| {
                    let file = context(path);
                    match check_one(path, &settings) {
                        Ok((report, exit_code)) => BatchEntry::Report { file, exit_code, report: Box::new(report) },
                        Err(e) => BatchEntry::Error { file, exit_code: e.exit_code(), error: e.to_string() },
                    }
                })
                .collect();
            let mut code = 0;
            for entry in &entries {
                match entry {
                    BatchEntry::Report { exit_code, .. } => code = code.max(*exit_code),
                    BatchEntry::Error { exit_code, error, .. } => {
                        eprintln!("trischmidt: {error}");
                        code = code.max(*exit_code);
                    }
                }
            }
            emit(&entries)?;
            Ok(code)
        }
        Command::Spectra { file } => {
            let report = commands::spectra(&read_input(&file)?, &context(&file), &settings)?;
            emit(&report)?;
            Ok(exit::DECOMPOSABLE)
        }
        Command::DecomposeBipartite { file } => {
            let report = commands::decompose_bipartite(&read_input(&file)?, &context(&file), &settings)?;
            emit(&report)?;
            Ok(exit::DECOMPOSABLE)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("trischmidt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
