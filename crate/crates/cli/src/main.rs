mod commands;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CliError, Output};

#[derive(Parser, Debug)]
#[command(name = "pell", version, about = "Pellytopes, their fans, and the Pellspace u-equations")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The normal fan Σ_d.
    Fan {
        #[arg(long)]
        d: usize,
    },
    /// Support and vertices of the pellytope.
    Polytope {
        #[arg(long)]
        d: usize,
    },
    /// M_d and its closed-form inverse.
    Matrix {
        #[arg(long)]
        d: usize,
    },
    /// The u-equations and the monomials of their generators.
    Uequations {
        #[arg(long)]
        d: usize,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long)]
        d: usize,
        /// Comma-separated subset of fan, matrix, uequations, binary, assoc, all.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        checks: Vec<commands::Check>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random configurations for the dihedral identities.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Refinement of Σ_{n−3} and the dihedral identities for the n-gon.
    Assoc {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PELL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| CliError::Usage(format!("PELL_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Fan { d } => commands::fan(*d),
        Command::Polytope { d } => commands::polytope(*d),
        Command::Matrix { d } => commands::matrix(*d),
        Command::Uequations { d } => commands::uequations(*d),
        Command::Verify { d, checks, seed, trials } => commands::verify(*d, checks, *seed, *trials as usize),
        Command::Assoc { n, trials, seed } => commands::assoc(*n, *trials as usize, *seed),
    }
}

fn emit(cli: &Cli, output: &Output) -> Result<(), CliError> {
    let mut body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&output.json).expect("JSON values serialise"),
        Format::Text => output.text.trim_end().to_string(),
    };
    body.push('\n');
    match &cli.out {
        Some(path) => fs::write(path, body).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|output| {
        emit(&cli, &output)?;
        Ok(output.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
