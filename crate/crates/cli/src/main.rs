//! `dicke-battery`: exact-diagonalization charging curves, short-time
//! amplification tables, speed-limit sweeps, and a self-contained
//! verification suite for the collective-spin (Dicke) quantum battery.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dicke_cli::commands::{self, CommonArgs};

#[derive(Parser)]
#[command(
    name = "dicke-battery",
    version,
    about = "Dicke quantum-battery simulation driver"
)]
struct Cli {
    /// Directory that receives every output file.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Fock cutoff (default 40).
    #[arg(long, global = true)]
    n_fock: Option<usize>,

    /// Time-grid end in units of 1/omega_0 (default 45).
    #[arg(long, global = true)]
    t_max: Option<f64>,

    /// Number of uniform time-grid points (default 2000).
    #[arg(long, global = true)]
    n_points: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one charging protocol and write eps(t) with its analytic
    /// reference curves.
    Trajectory {
        /// Battery size N (at least 2).
        #[arg(long)]
        n_qubits: usize,

        /// Coupling lambda > 0 in units of omega_0.
        #[arg(long)]
        lambda: f64,

        /// Mean photon number of the coherent charger.
        #[arg(long)]
        n_bar: f64,
    },

    /// Write the short-time amplification table A_num vs 4/N.
    Table1 {
        /// Battery sizes to tabulate (default: 2 3 4 5).
        #[arg(long, num_args = 1..)]
        n_qubits: Vec<usize>,
    },

    /// Run the (N, lambda, n_bar, eps) collapse sweep and write the
    /// points/summary/envelope/fit files plus a manifest.
    Sweep {
        /// key=value config file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,

        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },

    /// Run the verification suite; exits 1 naming any failed criterion.
    Check {
        /// key=value config file for the sweep-backed criteria.
        #[arg(long)]
        config: Option<PathBuf>,

        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,

        /// Self-test: inject one synthetic below-bound point and require
        /// the violation scanner to flag it (a healthy build exits 1).
        #[arg(long)]
        inject_violation: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = CommonArgs {
        out_dir: cli.out_dir,
        n_fock: cli.n_fock,
        t_max: cli.t_max,
        n_points: cli.n_points,
    };
    let outcome = match cli.command {
        Command::Trajectory {
            n_qubits,
            lambda,
            n_bar,
        } => commands::cmd_trajectory(&common, n_qubits, lambda, n_bar),
        Command::Table1 { n_qubits } => commands::cmd_table1(&common, &n_qubits),
        Command::Sweep { config, workers } => {
            commands::cmd_sweep(&common, config.as_deref(), workers)
        }
        Command::Check {
            config,
            workers,
            inject_violation,
        } => commands::cmd_check(&common, config.as_deref(), workers, inject_violation),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error[{}]: {}", error.tag(), error);
            ExitCode::from(error.exit_code())
        }
    }
}
