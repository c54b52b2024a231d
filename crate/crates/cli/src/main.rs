use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use symmetrize::Error;

mod bench;
mod prob;
mod verify;

/// Transition amplitudes and probabilities for identical particles.
#[derive(Parser, Debug)]
#[command(name = "symmetrize", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Outcome distribution of an experiment file.
    Prob {
        file: PathBuf,
        /// Report probabilities conditional on the listed finals.
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run numerical checks of the functional equations.
    Verify {
        /// Suite name, `all`, or a comma-separated list. May be repeated.
        #[arg(long, default_value = "all")]
        suite: Vec<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Tolerance override such as `gproduct=1e-8`. May be repeated.
        #[arg(long, value_name = "NAME=VALUE")]
        tol: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Time the permanent, determinant or full amplitude kernels.
    Bench {
        #[arg(long, value_enum)]
        kind: bench::Kind,
        #[arg(long)]
        min: usize,
        #[arg(long)]
        max: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Statistics for `h_fast`.
        #[arg(long, default_value = "fermion")]
        statistics: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

/// Failure of a command: exit status and message.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_resource_limit() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prob {
            file,
            normalize,
            format,
        } => prob::run(&file, normalize, format),
        Command::Verify {
            suite,
            seed,
            tol,
            format,
        } => verify::run(&suite, seed, &tol, format),
        Command::Bench {
            kind,
            min,
            max,
            reps,
            statistics,
            format,
        } => bench::run(kind, min, max, reps, &statistics, format),
    };
    match result {
        Ok((output, code)) => {
            print!("{output}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
