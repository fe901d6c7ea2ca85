use std::path::{Path, PathBuf};
use std::process::ExitCode;

use byzsel::Rational;
use byzsel_cli::{run, CliError, Command, OutputOptions, VerifyOptions};
use clap::{Args, Parser, Subcommand};

/// Optimal box selection against a hidden set of empty boxes.
#[derive(Parser)]
#[command(name = "byzsel", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Use exact rational arithmetic and print fractions.
    #[arg(long, global = true)]
    exact: bool,

    /// Emit one JSON document instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Significant digits for floating-point output.
    #[arg(long, global = true, default_value_t = 12)]
    precision: usize,

    /// Grid levels used by the grid check.
    #[arg(long, global = true, default_value_t = 10_000)]
    resolution: usize,

    /// Self-play rounds used by the game-value check.
    #[arg(long, global = true, default_value_t = 100_000)]
    iterations: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimal marginals, value, water level and the adversary's response.
    Solve {
        instance: PathBuf,
        /// Also run every applicable oracle check.
        #[arg(long)]
        verify: bool,
    },
    /// Draw sets of boxes realizing the optimal marginals.
    Sample {
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Write the optimal marginals as a mixture of at most n sets.
    Decompose { instance: PathBuf },
    /// Breakpoints of the value curve, one `E value k i` row each.
    Curve { instance: PathBuf },
    /// Worst-case value of user-supplied marginals.
    Eval { instance: PathBuf, marginals: PathBuf },
    /// Best deterministic selection.
    Baseline { instance: PathBuf },
    /// Cross-check the solver against independent oracles.
    Verify { instance: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn execute(cli: Cli) -> Result<byzsel_cli::Report, CliError> {
    let (command, instance) = match cli.command {
        Cmd::Solve { instance, verify } => (Command::Solve { verify }, instance),
        Cmd::Sample { instance, count, seed } => (Command::Sample { count, seed }, instance),
        Cmd::Decompose { instance } => (Command::Decompose, instance),
        Cmd::Curve { instance } => (Command::Curve, instance),
        Cmd::Eval { instance, marginals } => (
            Command::Eval {
                marginals: read(&marginals)?,
            },
            instance,
        ),
        Cmd::Baseline { instance } => (Command::Baseline, instance),
        Cmd::Verify { instance } => (Command::Verify, instance),
    };
    let text = read(&instance)?;
    let out = OutputOptions {
        json: cli.global.json,
        precision: cli.global.precision,
    };
    let verify = VerifyOptions {
        resolution: cli.global.resolution,
        iterations: cli.global.iterations,
    };
    if cli.global.exact {
        run::<Rational>(&command, &text, out, verify)
    } else {
        run::<f64>(&command, &text, out, verify)
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
