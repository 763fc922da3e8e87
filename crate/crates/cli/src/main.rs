use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod input;

/// Exit codes: 0 success, 1 a check failed, 2 usage error, 3 invalid input.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<sectorlen::Error> for CliError {
    fn from(e: sectorlen::Error) -> Self {
        use sectorlen::Error::*;
        let code = match e {
            InvalidArgument(_) | Unsupported(_) => 2,
            Infeasible(_) => 1,
            _ => 3,
        };
        Self { code, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "sectorlen", version, about = "Sector lengths of multi-qubit states: computation, exact bounds and polytope checks")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Sector lengths, linear entropies and mutual entropies of a state.
    Compute {
        /// State reference (`ghz:3`, `chi4`, `rand:3:seed=7:rank=4`, ...) or JSON file.
        state: String,
        #[arg(long, value_enum, default_value_t = Format::All)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Route::Auto)]
        route: Route,
    },
    /// Exact LP bounds with dual certificates.
    Bounds(BoundsArgs),
    /// Facets and vertices of the two- or three-qubit polytope.
    Polytope {
        #[arg(long)]
        n: usize,
        /// Classify a point `A_1,...,A_n`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Random-state and boundary-family scans against the polytope.
    Scan(ScanArgs),
    /// Verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Smaller sample counts.
        #[arg(long)]
        quick: bool,
    },
    /// Entanglement criteria from sector lengths.
    Detect {
        state: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Also check the pair-sum bound around this qubit (1-based).
        #[arg(long)]
        pivot: Option<usize>,
    },
    /// Spectral representability check for one- and two-body marginals.
    Represent {
        /// Spectra JSON `{"n", "one": {"1": [...]}, "two": {"1,2": [...]}}`.
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        pivot: usize,
    },
}

#[derive(Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    /// Preset to run.
    #[arg(long, value_enum, conflicts_with = "maximize")]
    pub prove: Option<Prove>,
    /// Sector index for `--prove insufficiency`.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Maximize `A_k` under `--assume`.
    #[arg(long)]
    pub maximize: Option<usize>,
    /// Constraints: purity_eq, M1, macwilliams, B0, shadows, shadows:3, a1_cap, a2_cap, cap:4, odd_sectors_zero.
    #[arg(long, value_delimiter = ',')]
    pub assume: Vec<String>,
}

#[derive(Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Ranks to cycle through; defaults to 1..=2^n.
    #[arg(long, value_delimiter = ',')]
    pub ranks: Vec<usize>,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Add the boundary-family grid sweeps (n = 3).
    #[arg(long)]
    pub families: bool,
    /// Grid points per family axis.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Sector,
    Entropy,
    Mutual,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Auto,
    Pauli,
    Purity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Prove {
    A2,
    A3,
    An,
    Corollary2,
    Insufficiency,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "appendixA")]
    AppendixA,
    #[value(name = "appendixB")]
    AppendixB,
    #[value(name = "appendixC")]
    AppendixC,
    Identities,
    All,
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("SECTORLEN_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::usage(format!("SECTORLEN_THREADS = {value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(&cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
