use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::{Failure, Header};

/// Loop-group factorizations and harmonic spheres in G₂.
#[derive(Parser, Debug)]
#[command(name = "g2loop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON file. A report written by another command is accepted; its `result` is read.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file for the JSON report (stdout when absent).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Residual threshold for the certificates (per-command default when absent).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative rank threshold of the floating backend.
    #[arg(long, global = true, default_value_t = 1e-8)]
    rank_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Backend::Float)]
    backend: Backend,
    /// Grid size `N` for `N × N` samples on `[−1, 1]²`.
    #[arg(long, global = true, default_value_t = 5)]
    grid: usize,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Product pattern of the weight lines.
    Table,
    /// Membership certificates of a Grassmannian point.
    CheckPoint,
    /// Seeded random point of a stratum.
    RandomPoint,
    /// Canonical factorization of a stratum point.
    Factorize,
    /// Normalization of a point or a holomorphic family.
    Normalize,
    /// Residual and certificates of polynomial Frenet data.
    FrenetVerify,
    /// Numerical solution of a Frenet template.
    FrenetSolve,
    /// Harmonic map on a grid.
    HarmonicEval,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Table => "table",
            Command::CheckPoint => "check-point",
            Command::RandomPoint => "random-point",
            Command::Factorize => "factorize",
            Command::Normalize => "normalize",
            Command::FrenetVerify => "frenet-verify",
            Command::FrenetSolve => "frenet-solve",
            Command::HarmonicEval => "harmonic-eval",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let header = Header::new(cli.command.name(), &cli);
    let outcome = commands::run(cli.command, &cli);
    let (text, status) = report::render(header, outcome);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(Failure::PARSE);
    }
    ExitCode::from(status)
}
