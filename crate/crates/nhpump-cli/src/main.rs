//! `nhpump` — parameter sweeps and figure-data reproduction for the driven
//! non-Hermitian Rice-Mele chain.
//!
//! Exit codes: 0 success, 2 argument errors, 3 domain errors (the error
//! name goes to stderr).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nhpump::eigen::Band;
use nhpump::model::Boundary;
use nhpump::Error;

mod commands;
mod report;

use commands::CmdError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Pbc,
    Obc,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Boundary {
        match b {
            BoundaryArg::Pbc => Boundary::Pbc,
            BoundaryArg::Obc => Boundary::Obc,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandArg {
    Plus,
    Minus,
}

impl From<BandArg> for Band {
    fn from(b: BandArg) -> Band {
        match b {
            BandArg::Plus => Band::Plus,
            BandArg::Minus => Band::Minus,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "nhpump",
    version,
    about = "Non-Hermitian Thouless pumping in the driven Rice-Mele chain",
    long_about = "Spectra, gap scans, biorthogonal Chern numbers, biorthogonal displacement, \
                  GBZ sweeps, and finite-chain oracles. Every run writes CSV data plus a JSON \
                  manifest sidecar."
)]
struct Cli {
    /// Worker pool size for sweeps (fallback: NHPUMP_JOBS, then all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Parser, Serialize)]
pub struct SpectrumArgs {
    /// Boundary condition
    #[arg(long, value_enum, default_value_t = BoundaryArg::Pbc)]
    pub boundary: BoundaryArg,
    /// Hopping scale
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    /// Nonreciprocity
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub gamma: f64,
    /// Drive phase
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// Momentum samples (inclusive of both ends)
    #[arg(long, default_value_t = 401)]
    pub n: usize,
    /// Output CSV path (default: spectrum.csv)
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Serialize)]
pub struct GapscanArgs {
    #[arg(long, value_enum, default_value_t = BoundaryArg::Pbc)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mu_max: f64,
    /// Sweep points
    #[arg(long, default_value_t = 201)]
    pub n_mu: usize,
    /// min |E| below this marks the point gapless
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Coarse torus grid per point
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Subdivision rounds around the argmin
    #[arg(long, default_value_t = 6)]
    pub refine_rounds: usize,
    /// Step shrink per round
    #[arg(long, default_value_t = 10)]
    pub refine_factor: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Serialize)]
pub struct ChernArgs {
    #[arg(long, value_enum, default_value_t = BoundaryArg::Pbc)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 41)]
    pub n_mu: usize,
    /// Torus grid (n x n)
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = BandArg::Minus)]
    pub band: BandArg,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Serialize)]
pub struct PumpArgs {
    #[arg(long, value_enum, default_value_t = BoundaryArg::Pbc)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub gamma: f64,
    /// One or more mu values (repeat the flag or comma-separate)
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Vec<f64>,
    #[arg(long, value_enum, default_value_t = BandArg::Minus)]
    pub band: BandArg,
    /// Drive slowdown A; one cycle spans physical time 2 pi A
    #[arg(long = "A", default_value_t = 1.0)]
    pub adiabatic_factor: f64,
    /// RK4 steps per cycle
    #[arg(long, default_value_t = 4000)]
    pub steps: usize,
    /// Momentum grid points (also the Chern reference grid)
    #[arg(long, default_value_t = 64)]
    pub n_k: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Serialize)]
pub struct GbzArgs {
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    /// Drive phase
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub t: f64,
    /// phi samples strictly inside (0, 2 pi)
    #[arg(long, default_value_t = 64)]
    pub n_phi: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Serialize)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub t: f64,
    /// Chain sizes to diagonalize
    #[arg(long, value_delimiter = ',', default_values_t = vec![15usize, 30, 60])]
    pub n_cells: Vec<usize>,
    /// GBZ spectrum theta points per cell (grid = theta_mult * n_cells)
    #[arg(long, default_value_t = 4)]
    pub theta_mult: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Band energies over the momentum grid at one drive phase
    Spectrum(SpectrumArgs),
    /// Gap minima and gapless mu intervals for one boundary condition
    Gapscan(GapscanArgs),
    /// Biorthogonal Chern numbers over a mu sweep, by both methods
    Chern(ChernArgs),
    /// Biorthogonal displacement over a drive cycle for one or more mu
    Pump(PumpArgs),
    /// beta roots over the phi sweep and the GBZ radius
    Gbz(GbzArgs),
    /// Finite-chain exact spectra against the GBZ prediction
    Oracle(OracleArgs),
}

fn build_pool(jobs: Option<usize>) -> rayon::ThreadPool {
    let jobs = jobs
        .or_else(|| {
            std::env::var("NHPUMP_JOBS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = build_pool(cli.jobs);
    let result = pool.install(|| match &cli.command {
        Command::Spectrum(args) => commands::spectrum(args),
        Command::Gapscan(args) => commands::gapscan(args),
        Command::Chern(args) => commands::chern(args),
        Command::Pump(args) => commands::pump(args),
        Command::Gbz(args) => commands::gbz_cmd(args),
        Command::Oracle(args) => commands::oracle(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::FAILURE
        }
        Err(CmdError::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            match e {
                Error::InvalidArgument(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
