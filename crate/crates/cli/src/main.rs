//! `stefan`: batch front-end for the similarity solver.

mod commands;
mod config;
mod error;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::LoadedConfig;
use crate::error::CliError;
use crate::output::{note, OutputDir, RunClock, RUN_META};

#[derive(Debug, Parser)]
#[command(name = "stefan", version, about = "Similarity solutions of one-phase Stefan problems")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `outputs.dir`.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Grid intervals on [0, lambda]; overrides `numerics.grid`.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Suppress progress output on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Solve for the front coefficient and write the profile, field and front.
    Solve,
    /// Evaluate the existence certificate without solving.
    Certify,
    /// Closed-form solution for constant reference coefficients.
    Oracle,
    /// Solve over the Cartesian grid in the `sweep` block.
    Sweep,
    /// Solve, then cross-check against a front-fixing finite-difference scheme.
    VerifyPde,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Certify => "certify",
            Command::Oracle => "oracle",
            Command::Sweep => "sweep",
            Command::VerifyPde => "verify-pde",
        }
    }
}

fn load(cli: &Cli) -> Result<Context, CliError> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::Config("no configuration given (use --config)".into()))?;
    let mut loaded = LoadedConfig::from_path(path)?;
    if let Some(grid) = cli.grid {
        loaded.config.numerics.grid = grid;
        loaded.config.numerics.settings().validate().map_err(|e| CliError::Config(format!("--grid: {e}")))?;
    }
    if cli.workers == Some(0) {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    let dir = match &cli.out {
        Some(d) => d.clone(),
        None => loaded.base_dir.join(&loaded.config.outputs.dir),
    };
    Ok(Context { out: OutputDir::create(dir)?, loaded, quiet: cli.quiet, workers: cli.workers })
}

fn run(ctx: &Context, command: Command) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Solve => commands::solve(ctx),
        Command::Certify => commands::certify(ctx),
        Command::Oracle => commands::oracle(ctx),
        Command::Sweep => sweep::sweep(ctx),
        Command::VerifyPde => commands::verify_pde(ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let clock = RunClock::start();
    let ctx = match load(&cli) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let result = run(&ctx, cli.command);
    let files = result.as_ref().map(Vec::clone).unwrap_or_default();
    let meta = clock.finish(cli.command.name(), cli.config.as_deref(), &files, result.as_ref().map(|_| ()));
    if let Err(e) = ctx.out.write_json(RUN_META, &meta) {
        eprintln!("warning: {e}");
    }
    match result {
        Ok(files) => {
            for f in files {
                note(cli.quiet, format!("wrote {}", f.display()));
            }
            ExitCode::from(error::EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
