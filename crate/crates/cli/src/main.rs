//! Command-line driver reproducing the trade-off, baseline, state, and
//! channel data sets as CSV, plus a self-verification suite.

mod grid;
mod run;
mod verify;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use grid::GridSpec;

use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mdm",
    about = "Fidelity trade-off for covariant measurements on coherent states",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct SolverOpts {
    /// Fock truncation dimension per block.
    #[arg(long, default_value_t = 500)]
    dim: usize,
    /// Largest photon-number-difference block to scan.
    #[arg(long, default_value_t = 30)]
    lmax: usize,
    /// Relative eigenvalue tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Also scan the +L blocks to verify the domination argument.
    #[arg(long)]
    verify_blocks: bool,
}

impl SolverOpts {
    fn params(&self) -> anyhow::Result<mdm_core::ScanParams> {
        if self.dim == 0 {
            anyhow::bail!("--dim must be at least 1");
        }
        if self.tol <= 0.0 {
            anyhow::bail!("--tol must be positive");
        }
        Ok(mdm_core::ScanParams {
            dim: self.dim,
            l_max: self.lmax,
            tol: self.tol,
            verify_blocks: self.verify_blocks,
            ..mdm_core::ScanParams::default()
        })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan the weight p and emit the optimized trade-off curve.
    Tradeoff {
        #[command(flatten)]
        solver: SolverOpts,
        /// Weight grid START:STOP:COUNT within [0, 1].
        #[arg(long, default_value = "0:0.999:101")]
        p_grid: GridSpec,
        /// Output CSV path.
        #[arg(long, default_value = "tradeoff.csv")]
        out: PathBuf,
    },
    /// Emit the closed-form Gaussian and photon-subtracted baselines.
    Baselines {
        /// Squeezing grid START:STOP:COUNT, r >= 0.
        #[arg(long, default_value = "0:2:81")]
        r_grid: GridSpec,
        /// Photon-subtraction grid START:STOP:COUNT within [0, 1).
        #[arg(long, default_value = "0:0.95:96")]
        x_grid: GridSpec,
        #[arg(long, default_value = "baselines.csv")]
        out: PathBuf,
    },
    /// Extract the optimal state at a target output fidelity, with its
    /// non-Gaussianity report and TMSV coefficient differences.
    State {
        #[command(flatten)]
        solver: SolverOpts,
        /// Target output fidelity in [0.5, 1).
        #[arg(long)]
        target_f: f64,
        /// Output directory for state.txt, gaussianity.txt, delta_c.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compare direct, Gaussian, and non-Gaussian transmission over a lossy
    /// channel.
    Channel {
        #[command(flatten)]
        solver: SolverOpts,
        #[arg(long, default_value = "0:0.999:101")]
        p_grid: GridSpec,
        #[arg(long, default_value = "channel.csv")]
        out: PathBuf,
    },
    /// Run the oracle-equivalence, cross-check, and domination suites.
    Verify {
        /// RNG seed for the random-state and Monte-Carlo checks.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Monte-Carlo sample count.
        #[arg(long, default_value_t = 200_000)]
        mc_samples: usize,
        /// Debug hook: corrupt one matrix entry to prove the checks notice.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Dump one operator block as CSV (debug aid for external cross-checks).
    #[command(hide = true)]
    Dump {
        /// Block kind: rf, rg, or r.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        l: i32,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        /// Weight for kind = r.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value = "block.csv")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let outcome = match cli.command {
        Command::Tradeoff { solver, p_grid, out } => run::tradeoff(&solver, p_grid, &out),
        Command::Baselines { r_grid, x_grid, out } => run::baselines(r_grid, x_grid, &out),
        Command::State { solver, target_f, out } => run::state(&solver, target_f, &out),
        Command::Channel { solver, p_grid, out } => run::channel(&solver, p_grid, &out),
        Command::Verify {
            seed,
            mc_samples,
            corrupt,
        } => verify::run(seed, mc_samples, corrupt),
        Command::Dump { kind, l, dim, p, out } => run::dump(&kind, l, dim, p, &out),
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Error carrying the exit-code contract: 1 usage, 2 numerical failure.
#[derive(Debug)]
pub struct CliError {
    source: anyhow::Error,
    code: u8,
}

impl CliError {
    pub fn usage(source: anyhow::Error) -> Self {
        Self {
            source,
            code: EXIT_USAGE,
        }
    }

    pub fn numerical(source: anyhow::Error) -> Self {
        Self {
            source,
            code: EXIT_NUMERICAL,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl std::error::Error for CliError {}
