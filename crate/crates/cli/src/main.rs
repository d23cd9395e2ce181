//! `nitdistill`: threshold reports, curve data, distillation tables,
//! protocol simulation and oracle checks for qunit key distillation.

mod commands;
mod record;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use nitdistill::simulator::DEFAULT_BLOCKS;

use record::{Format, OutputRecord};
use verify::Level;

#[derive(Parser, Debug)]
#[command(name = "nitdistill", version, about = "Key distillation thresholds for qunit tomographic protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Significant digits for floating-point values.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Triple point, distillation threshold and zero-yield intersection.
    TriplePoint {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Samples of curves a-d against Eve's eta0.
    Curves {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Exact error rates after advantage distillation, L = 1..L-max.
    AdTable {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        beta0: f64,
        #[arg(long = "L-max", default_value_t = 20)]
        l_max: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo run of the distillation protocol.
    Simulate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        beta0: f64,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value_t = DEFAULT_BLOCKS)]
        blocks: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Cross-check the independent oracles; exits 2 on any failure.
    Verify {
        #[arg(value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
}

impl From<nitdistill::Error> for CliError {
    fn from(e: nitdistill::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Io(path, e) => write!(f, "cannot write {}: {e}", path.display()),
        }
    }
}

fn emit(rec: &OutputRecord, out: &Output) -> Result<(), CliError> {
    let text = rec.render(out.format, out.precision.into());
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, CliError> {
    let (rec, out, ok) = match cmd {
        Command::TriplePoint { n, out } => (commands::triple_point(n)?, out, true),
        Command::Curves { n, grid, out } => (commands::curves(n, grid)?, out, true),
        Command::AdTable { n, beta0, l_max, out } => (commands::ad_table(n, beta0, l_max)?, out, true),
        Command::Simulate { n, beta0, l, blocks, seed, out } => {
            (commands::simulate(n, beta0, l, blocks, seed)?, out, true)
        }
        Command::Verify { level, out } => {
            let (rec, ok) = verify::run(level)?;
            (rec, out, ok)
        }
    };
    emit(&rec, &out)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nitdistill: {e}");
            ExitCode::from(1)
        }
    }
}
