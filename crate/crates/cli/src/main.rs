use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hurwitz_cli::{exit, run, FigureParams, OutputMode, RunConfig, Verb};
use hurwitz_core::count::{Ceilings, Execution};

/// Exact combinatorics of Hurwitz correspondences on marked spheres.
#[derive(Debug, Parser)]
#[command(name = "hurwitz", version)]
struct Cli {
    /// Emit stable key=value lines instead of a table.
    #[arg(long, global = true)]
    machine: bool,
    /// Include the per-point bookkeeping behind each number.
    #[arg(long, global = true)]
    ledger: bool,
    /// Refuse data of higher degree.
    #[arg(long, global = true, default_value_t = Ceilings::default().max_degree)]
    max_degree: u32,
    /// Refuse searches over more raw tuples than this.
    #[arg(long, global = true, default_value_t = Ceilings::default().max_tuples)]
    max_tuples: u128,
    /// Directory of the result cache; caching is off without it.
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    verb: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Portrait file.
    file: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the portrait conditions and list violations.
    Validate(Input),
    /// Number of marked constellations (degree of the target map).
    Count(Input),
    /// Braid orbits on the constellations.
    Components(Input),
    /// Polynomiality index and periodic cycles.
    Pi(Input),
    /// Interval bounds on the dynamical degrees.
    Bounds(Input),
    /// Degree of the source map, for four points.
    ThetaTop(Input),
    /// CSV band for a single-valued inverse.
    Figure {
        /// Portrait supplying d, |P| and ell0.
        file: Option<PathBuf>,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        ell0: Option<u32>,
    },
    /// The full pipeline in one report.
    Report(Input),
}

fn config(cli: Cli) -> RunConfig {
    let (verb, input, figure) = match cli.verb {
        Command::Validate(i) => (Verb::Validate, Some(i.file), FigureParams::default()),
        Command::Count(i) => (Verb::Count, Some(i.file), FigureParams::default()),
        Command::Components(i) => (Verb::Components, Some(i.file), FigureParams::default()),
        Command::Pi(i) => (Verb::Pi, Some(i.file), FigureParams::default()),
        Command::Bounds(i) => (Verb::Bounds, Some(i.file), FigureParams::default()),
        Command::ThetaTop(i) => (Verb::ThetaTop, Some(i.file), FigureParams::default()),
        Command::Report(i) => (Verb::Report, Some(i.file), FigureParams::default()),
        Command::Figure {
            file,
            degree,
            points,
            ell0,
        } => (Verb::Figure, file, FigureParams { degree, points, ell0 }),
    };
    RunConfig {
        mode: if cli.machine { OutputMode::Machine } else { OutputMode::Human },
        ledger: cli.ledger,
        ceilings: Ceilings {
            max_degree: cli.max_degree,
            max_tuples: cli.max_tuples,
        },
        execution: if cli.serial { Execution::Serial } else { Execution::default() },
        cache_dir: cli.cache,
        figure,
        ..RunConfig::new(verb, input)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version are successes; usage errors share the input failure status
            return if e.use_stderr() {
                ExitCode::from(exit::INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = run(&config(cli));
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code)
}
