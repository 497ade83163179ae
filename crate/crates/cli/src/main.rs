//! `reliq`: thresholds, fixed points and seeded simulations for computation
//! with noisy gates over small alphabets.
//!
//! Exit codes: 0 success, 1 a verified property failed, 2 usage error,
//! 3 resource limit.

mod commands;
mod render;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "reliq", version, about = "noisy-gate reliability toolkit")]
struct Cli {
    /// Cap the worker pool for parallel commands.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Restoration coefficients of the plurality gate, by one or both routes.
    Coeffs(commands::CoeffsArgs),
    /// Both bifurcation thresholds for one (q, k) pair.
    Threshold(commands::ThresholdArgs),
    /// CSV sweeps: thresholds over (q, k), or fixed points over noise.
    #[command(subcommand)]
    Scan(commands::ScanCommand),
    /// Fixed points of the scalar error map at one noise rate.
    FixedPoints(commands::FixedPointsArgs),
    /// Displacement field of a simplex map on a triangular grid (CSV).
    Field(commands::FieldArgs),
    /// Closed-form fixed points of the ternary denoiser.
    DenFixedPoints(commands::DenFixedPointsArgs),
    /// Check the error-signaling NAND inequalities and closed forms.
    VerifyEnand(commands::VerifyEnandArgs),
    /// Check the additive gate family's propagation laws at one alphabet.
    VerifyPa(commands::VerifyPaArgs),
    /// Distinguishability margin of the modular product gate.
    Mul(commands::MulArgs),
    /// Run a seeded noisy-circuit experiment from a JSON config.
    Simulate(commands::SimulateArgs),
    /// Truth-table import and export.
    #[command(subcommand)]
    Gate(commands::GateCommand),
    /// Run the built-in cross-module invariant suite.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // Ignore a second initialization (e.g. under test harnesses); the
        // pool is process-global.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let verified = match run(&cli.command) {
        Ok(v) => v,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(exit_code_for(&err));
        }
    };
    if verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(command: &Command) -> anyhow::Result<bool> {
    match command {
        Command::Coeffs(args) => commands::coeffs(args),
        Command::Threshold(args) => commands::threshold(args),
        Command::Scan(cmd) => commands::scan(cmd),
        Command::FixedPoints(args) => commands::fixed_points(args),
        Command::Field(args) => commands::field(args),
        Command::DenFixedPoints(args) => commands::den_fixed_points_cmd(args),
        Command::VerifyEnand(args) => commands::verify_enand(args),
        Command::VerifyPa(args) => commands::verify_pa(args),
        Command::Mul(args) => commands::mul(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Gate(cmd) => commands::gate(cmd),
        Command::Selftest => commands::selftest(),
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(lib) = err.downcast_ref::<reliq::Error>() {
        return match lib {
            reliq::Error::ResourceLimit(_) => 3,
            _ => 2,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 3;
    }
    2
}
