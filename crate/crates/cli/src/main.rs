//! `fingerlab` command-line front end.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(
    name = "fingerlab",
    version,
    about = "Evaluate, search and bound one-sided-error fingerprinting strategies"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Wall-clock budget for exhaustive searches.
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    /// Node budget for exhaustive searches (reproducible across machines).
    #[arg(long, global = true)]
    pub budget_nodes: Option<u64>,
    /// Tolerance override for floating-point checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Error report of a strategy file.
    Eval {
        #[arg(long)]
        strategy: std::path::PathBuf,
    },
    /// Binary strategy from p and q (q omitted: one-way).
    Complete {
        #[arg(long)]
        input: std::path::PathBuf,
    },
    #[command(subcommand)]
    Search(commands::SearchCmd),
    #[command(subcommand)]
    Construct(commands::ConstructCmd),
    #[command(subcommand)]
    Bounds(commands::BoundsCmd),
    /// Regenerate a reference table and diff it against the bundled copy.
    Tables(commands::TablesArgs),
    #[command(subcommand)]
    Quantum(commands::QuantumCmd),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.run.threads)
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(1);
    }
    let run = cli.run.clone();
    let result = match cli.command {
        Command::Eval { strategy } => commands::eval(&run, &strategy),
        Command::Complete { input } => commands::complete(&run, &input),
        Command::Search(c) => commands::search(&run, c),
        Command::Construct(c) => commands::construct(&run, c),
        Command::Bounds(c) => commands::bounds(&run, c),
        Command::Tables(a) => commands::tables(&run, a),
        Command::Quantum(c) => commands::quantum(&run, c),
    };
    match result {
        Ok(out) => emit(&run, out),
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
        Err(commands::Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit(run: &RunConfig, out: Outcome) -> ExitCode {
    match run.format {
        Format::Json => print!("{}", fingerlab::io::to_pretty(&out.envelope())),
        Format::Text => print!("{}", out.text),
        Format::Csv => match &out.csv {
            Some(csv) => print!("{csv}"),
            None => {
                eprintln!("error: this command has no CSV output; use --format json or text");
                return ExitCode::from(64);
            }
        },
    }
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    ExitCode::from(out.code)
}
