//! `tensornet`: build, plan, execute and verify tensor networks, and
//! certify socket-width lower bounds.

mod bench;
mod commands;
mod maps;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tensornet::field::FieldKind;

#[derive(Parser, Debug)]
#[command(name = "tensornet", version, about = "Tensor network construction, planning and certification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Field: rational, gf:p or f64.
    #[arg(long, global = true)]
    pub field: Option<FieldKind>,
    /// Seed for random inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest component the exact planner accepts.
    #[arg(long, global = true, default_value_t = tensornet::planner::DEFAULT_EXACT_BOUND)]
    pub exact_bound: usize,
}

/// Parameters shared by generators and maps.
#[derive(Args, Debug, Clone, Default)]
pub struct Params {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    /// Convolution group: cyclic or xor.
    #[arg(long)]
    pub group: Option<String>,
    /// Yates base: zeta, mobius, hadamard, or JSON rows.
    #[arg(long)]
    pub base: Option<String>,
    /// Pattern: K4, K4^3, P4, C5, or edge-list text.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Pattern read from an edge-list file.
    #[arg(long)]
    pub pattern_file: Option<PathBuf>,
    /// Root of unity for fft and dft.
    #[arg(long)]
    pub root: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ObjectiveArg {
    MaxStep,
    TotalWork,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a network file from a generator.
    Build {
        #[arg(long)]
        generator: String,
        #[command(flatten)]
        params: Params,
        /// Network file to write (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the construction's plan.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Plan a network and report its cost.
    Plan {
        #[arg(long)]
        network: PathBuf,
        /// Join the cheapest adjacent pair instead of planning exactly.
        #[arg(long)]
        greedy: bool,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxStep)]
        objective: ObjectiveArg,
        /// Plan file to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a plan on seeded random inputs.
    Exec {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Compare a network's value with a reference oracle.
    Verify {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Oracle family; must agree with the file's generator when it records one.
        #[arg(long)]
        oracle: Option<String>,
        #[command(flatten)]
        params: Params,
        /// Number of random input draws.
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Compute an exact socket-width certificate.
    SocketWidth {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        params: Params,
        /// Include the width of every socket tree.
        #[arg(long)]
        log: bool,
    },
    /// Search for a minimum-width branch decomposition of a pattern.
    Branchwidth {
        #[command(flatten)]
        params: Params,
    },
    /// Plan and execute builders over a sweep, next to their cost bounds.
    Bench {
        #[arg(long)]
        generator: Option<String>,
        #[command(flatten)]
        params: Params,
        /// First sweep value.
        #[arg(long)]
        from: Option<usize>,
        /// Last sweep value.
        #[arg(long)]
        to: Option<usize>,
    },
}

/// A failed command and its exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Invalid(String),
    Mismatch,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invalid(_) => 3,
            Failure::Mismatch => 4,
        }
    }
}

pub fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, f)) => {
            print!("{out}");
            match &f {
                Failure::Usage(m) | Failure::Invalid(m) => eprintln!("error: {m}"),
                Failure::Mismatch => {}
            }
            ExitCode::from(f.code())
        }
    }
}
