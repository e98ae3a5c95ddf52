//! `cmld` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cmld", version, about = "Component rates, fluid limits and exploration simulations for the configuration model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; JSON unless stated otherwise. `verify` prints a table
    /// unless JSON is requested.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Write output to FILE instead of stdout.
    #[arg(long, value_name = "FILE", global = true)]
    out: Option<PathBuf>,
}

impl Cli {
    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a rate function.
    #[command(subcommand)]
    Rate(RateCommand),
    /// Fluid limit of the exploration on [0, T].
    Lln {
        #[arg(long, value_name = "FILE")]
        p: PathBuf,
        #[arg(long = "T", value_name = "REAL")]
        t: f64,
        #[arg(long, value_name = "INT", default_value_t = 1001)]
        grid: usize,
    },
    /// Optimal path segment between two states.
    Path {
        #[arg(long, value_name = "FILE")]
        x1: PathBuf,
        #[arg(long, value_name = "FILE")]
        x2: PathBuf,
        #[arg(long, value_name = "INT", default_value_t = 1001)]
        grid: usize,
    },
    /// One exploration of a random multigraph.
    Simulate {
        /// Degree file, or a JSON array holding a degree sequence.
        #[arg(long, value_name = "FILE")]
        p: PathBuf,
        /// Number of vertices; ignored for an explicit degree sequence.
        #[arg(long, value_name = "INT")]
        n: Option<usize>,
        #[arg(long, value_name = "INT")]
        seed: u64,
        /// Keep every exploration state.
        #[arg(long)]
        trajectory: bool,
    },
    /// Monte Carlo probability that some component matches `q`.
    Estimate(EstimateArgs),
    /// Run the cross-consistency battery.
    Verify {
        /// Smaller randomized and Monte Carlo checks.
        #[arg(long)]
        fast: bool,
    },
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Degree file, or a JSON array holding a degree sequence.
    #[arg(long, value_name = "FILE")]
    p: PathBuf,
    #[arg(long, value_name = "FILE")]
    q: PathBuf,
    /// Graph sizes; repeat the flag or separate with commas. Ignored for an
    /// explicit degree sequence.
    #[arg(long, value_name = "INT", value_delimiter = ',')]
    n: Vec<usize>,
    /// Window half-width as a fraction of n; defaults to 1/n.
    #[arg(long, value_name = "REAL")]
    eps: Option<f64>,
    #[arg(long, value_name = "INT")]
    reps: u64,
    #[arg(long, value_name = "INT")]
    seed: u64,
    #[arg(long, value_name = "INT", default_value_t = 1)]
    workers: usize,
}

#[derive(Debug, Subcommand)]
enum RateCommand {
    /// Rate for a component with degree configuration q.
    Degree {
        #[arg(long, value_name = "FILE")]
        p: PathBuf,
        #[arg(long, value_name = "FILE")]
        q: PathBuf,
    },
    /// D-regular graph; several --q values give the conjectured rate for
    /// that many components.
    Dreg {
        #[arg(long = "D", value_name = "INT")]
        d: u32,
        #[arg(long, value_name = "REAL", required = true, value_delimiter = ',')]
        q: Vec<f64>,
    },
    /// D-regular component inside a graph with degree distribution p.
    DregSub {
        #[arg(long, value_name = "FILE")]
        p: PathBuf,
        #[arg(long = "D", value_name = "INT")]
        d: u32,
        #[arg(long, value_name = "REAL")]
        q: f64,
    },
    /// Component holding a fraction r of the vertices.
    Size {
        #[arg(long, value_name = "FILE")]
        p: PathBuf,
        #[arg(long, value_name = "REAL")]
        r: f64,
    },
    /// Conjectured rate for the largest component of a D-regular graph.
    LargestConj {
        #[arg(long = "D", value_name = "INT")]
        d: u32,
        #[arg(long, value_name = "REAL")]
        x: f64,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<cmld_core::Error>() {
        Some(e) if e.is_infeasible_input() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
