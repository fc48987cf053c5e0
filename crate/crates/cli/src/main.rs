//! `proxid`: identify interventional distributions with proximal kernel
//! operations, verify the resulting functionals against exact models, and
//! inspect districts and operation assumptions.
//!
//! Exit codes: 0 identified / all checks passed, 1 parse or I/O error,
//! 2 no strategy found (or a checked operation fails), 3 search budget
//! exhausted, 4 a verification trial exceeded the tolerance.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "proxid", version, about = "Proximal causal identification engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an identifying strategy and print its certificate.
    Identify {
        graph: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identify on random models and compare each functional to the exact
    /// interventional distribution.
    Verify {
        graph: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Write the JSON-lines report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the latent projection, `Y*` and the districts for a projection set.
    Districts {
        graph: PathBuf,
        #[arg(long, default_value = "")]
        h_set: String,
    },
    /// Check the assumptions of one operation on `p(V)`, optionally after
    /// fixing some vertices.
    Check {
        graph: PathBuf,
        /// Fix, Obf, Tbf, Ebf or Cut.
        #[arg(long)]
        op: String,
        /// Vertex the operation acts on.
        #[arg(long)]
        on: String,
        #[arg(long, default_value = "")]
        w: String,
        #[arg(long, default_value = "")]
        z: String,
        /// Vertices to fix first, in order.
        #[arg(long, default_value = "")]
        fix: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Oracle)]
        mode: ModeArg,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print exact interventional distributions of a model file.
    Oracle {
        model: PathBuf,
        /// Treatment names; defaults to the file's query line.
        #[arg(long)]
        treat: Option<String>,
        #[arg(long)]
        outcome: Option<String>,
    },
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Oracle)]
    mode: ModeArg,
    /// Model file for oracle mode; a seeded random model otherwise.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Observed vertices to project out besides the latents, or `auto`.
    #[arg(long, default_value = "auto")]
    h_set: String,
    #[arg(long, default_value_t = id_engine::DEFAULT_BUDGET)]
    budget: usize,
    /// Operations the search may use.
    #[arg(long, default_value = "fix,obf,tbf,ebf")]
    ops: String,
    /// Try bridge operations before Fix at each position.
    #[arg(long)]
    proxy_first: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Declared,
    Oracle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Identify { graph, search, out } => commands::identify(&graph, &search, out.as_deref()),
        Command::Verify { graph, search, trials, tol, out } => {
            commands::verify(&graph, &search, trials, tol, out.as_deref())
        }
        Command::Districts { graph, h_set } => commands::districts(&graph, &h_set),
        Command::Check { graph, op, on, w, z, fix, mode, model, seed, json } => {
            let step = commands::CheckStep { op, on, w, z, fix };
            commands::check(&graph, &step, mode, model.as_deref(), seed, json)
        }
        Command::Oracle { model, treat, outcome } => commands::oracle(&model, treat.as_deref(), outcome.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_INPUT)
        }
    }
}
