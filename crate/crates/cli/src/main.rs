//! `qap`: command-line front end for qap-core.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{AnalyzeArgs, Globals, HopfieldArgs};
use config::{parse_range, Direction, InputKind, RunConfig};
use error::CliError;
use qap_core::apgen::Mode;

#[derive(Parser)]
#[command(name = "qap", version, about = "Almost periodicity analysis and solvers on the quantum time scale")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: current directory)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Time-scale base q > 1
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Index window A..B
    #[arg(long, global = true, value_parser = parse_range, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    /// Seed for sampled checks (default 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Residual or convergence tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Unweighted,
    Weighted,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Unweighted => Mode::Unweighted,
            ModeArg::Weighted => Mode::Weighted,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Translation sets and AP evidence for a signal or generator
    Analyze {
        /// Signal, grid function or generator JSON
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<InputKind>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Comma-separated epsilons
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        epsilons: Option<Vec<f64>>,
        /// Candidate translations A..B
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        tau_range: Option<(i64, i64)>,
    },
    /// Convert between grid functions and log signals
    Transform {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        direction: Option<Direction>,
    },
    /// Step a dynamic system forward from a history segment
    Solve {
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        history: Option<PathBuf>,
        /// Last index to step to
        #[arg(long, allow_hyphen_values = true)]
        n_end: Option<i64>,
    },
    /// Certificate check or Picard solve of a Hopfield network
    Hopfield {
        #[command(subcommand)]
        mode: HopfieldMode,
    },
}

#[derive(Args)]
struct HopfieldFlags {
    /// Network specification JSON
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Radius of the invariant ball
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

impl From<HopfieldFlags> for HopfieldArgs {
    fn from(f: HopfieldFlags) -> Self {
        HopfieldArgs {
            spec: f.spec,
            r0: f.r0,
            tail_tol: f.tail_tol,
            max_iter: f.max_iter,
        }
    }
}

#[derive(Subcommand)]
enum HopfieldMode {
    Check(HopfieldFlags),
    Solve(HopfieldFlags),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let c = cli.common;
    let g = Globals {
        q: c.q.or(cfg.q),
        window: c.window.or(cfg.window),
        tol: c.tol.or(cfg.tol),
        seed: c.seed.or(cfg.seed).unwrap_or(0),
        out: c.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(".")),
    };
    match cli.command {
        Command::Analyze {
            input,
            kind,
            mode,
            epsilons,
            tau_range,
        } => commands::analyze(
            &g,
            &cfg,
            AnalyzeArgs {
                input,
                kind,
                mode: mode.map(Mode::from),
                epsilons,
                tau_range,
            },
        ),
        Command::Transform { input, direction } => commands::transform(&g, &cfg, input, direction),
        Command::Solve {
            system,
            history,
            n_end,
        } => commands::solve(&g, &cfg, system, history, n_end),
        Command::Hopfield { mode } => match mode {
            HopfieldMode::Check(f) => commands::hopfield_check(&g, &cfg, f.into()),
            HopfieldMode::Solve(f) => commands::hopfield_solve(&g, &cfg, f.into()),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
