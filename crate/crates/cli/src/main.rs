mod bundle;
mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::bundle::Overrides;
use crate::failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "netflowsym", version, about = "Coupled diffusion and Schrödinger flows on directed metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Classify,
    Wellposed,
    Symmetry,
    Simulate,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graph classification.
    Classify(Args),
    /// Algebraic well-posedness and stability flags.
    Wellposed(Args),
    /// Invariance checks for every listed projection.
    Symmetry(Args),
    /// Time stepping; writes one trajectory per initial datum and mode.
    Simulate(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    bundle: PathBuf,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "./out")]
    out_dir: PathBuf,
    /// Worker threads for independent projections and runs.
    #[arg(long)]
    jobs: Option<usize>,
}

fn run(kind: Kind, args: &Args) -> Result<Option<Failure>, Failure> {
    let overrides = Overrides {
        dt: args.dt,
        t_end: args.t_end,
        seed: args.seed,
    };
    let b = bundle::load(&args.bundle, &overrides)?;
    let (report, failure) = match kind {
        Kind::Classify => commands::classify(&b)?,
        Kind::Wellposed => commands::wellposed(&b)?,
        Kind::Symmetry => commands::symmetry(&b)?,
        Kind::Simulate => commands::simulate(&b, &args.out_dir)?,
    };
    commands::write_report(&report, &args.out_dir)?;
    Ok(failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Classify(a) => (Kind::Classify, a),
        Command::Wellposed(a) => (Kind::Wellposed, a),
        Command::Symmetry(a) => (Kind::Symmetry, a),
        Command::Simulate(a) => (Kind::Simulate, a),
    };
    let threads = args.jobs.unwrap_or(1).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(kind, args)) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(f)) | Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
