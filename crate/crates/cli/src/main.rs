//! `crossdiff`: analyse and simulate triangular cross-diffusion systems.
//!
//! Every command writes its outputs into `<out>/<hash>/`, where `<hash>` is
//! derived from the command and the fully resolved configuration, together
//! with a `manifest.json` that embeds that configuration.

mod commands;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crossdiff::turing::{D2Sign, SignPattern};
use crossdiff::Error;

#[derive(Parser, Debug)]
#[command(
    name = "crossdiff",
    version,
    about = "Turing analysis and simulation of triangular cross-diffusion systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON run configuration (or a manifest of an earlier run).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Parent directory of the run directory [default: config `output_dir`, else `runs`].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Random seed, overriding the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated ε values for `sweep`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LIST")]
    pub epsilons: Option<Vec<f64>>,
    /// Comma-separated d12 values: a list for `sweep`, a single override elsewhere.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LIST")]
    pub d12: Option<Vec<f64>>,
    /// Do not print the run directory and summary.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kinetic regime, equilibria and their stability.
    Analyze(Common),
    /// Turing threshold of the configured diffusivity family.
    Threshold(Common),
    /// Mode determinant and growth rate against λ.
    Dispersion(Common),
    /// Integrate the configured system and summarise the pattern.
    Simulate(Common),
    /// ε-sweep towards the fast-reaction limit, or d12-sweep of the unstable band.
    Sweep(Common),
    /// Classify a Jacobian sign pattern against the sign of d2 D.
    Classify {
        /// Signs of J11, J12, J21, J22, e.g. `-,-,-,-`.
        #[arg(long, allow_hyphen_values = true)]
        signs: SignPattern,
        /// Sign of d2 D: `+`, `-` or `0`.
        #[arg(long = "d2-sign", allow_hyphen_values = true)]
        d2_sign: D2Sign,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 1;

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else if e.code() == "io" {
        EXIT_IO
    } else {
        EXIT_VALIDATION
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(c) => commands::analyze(&c),
        Command::Threshold(c) => commands::threshold(&c),
        Command::Dispersion(c) => commands::dispersion(&c),
        Command::Simulate(c) => commands::simulate(&c),
        Command::Sweep(c) => commands::sweep(&c),
        Command::Classify { signs, d2_sign, out, quiet } => commands::classify(
            signs,
            d2_sign,
            &Common {
                out,
                quiet,
                ..Default::default()
            },
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
