use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qheis::harness::{run_suite, PartialConfig, SuiteConfig, SuiteId};
use qheis::{emit_report, Error};

/// Numerical verification suites for q-deformed Heisenberg algebras.
#[derive(Parser, Debug)]
#[command(name = "qheis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one suite and write its JSON report (stdout unless --out).
    Suite(SuiteArgs),
}

#[derive(clap::Args, Debug)]
struct SuiteArgs {
    /// sl2-bose, sl2-fermi, slN, soN-orbital, qspecial, kz-scalar, kz-operator, braid
    id: String,
    /// Deformation parameter(s).
    #[arg(long, num_args = 1.., value_name = "F")]
    q: Option<Vec<f64>>,
    /// Fock-space occupation cutoff.
    #[arg(long, value_name = "INT")]
    cutoff: Option<usize>,
    /// Number of oscillator modes N.
    #[arg(long, value_name = "INT")]
    modes: Option<usize>,
    /// Sign choice for the kz suites.
    #[arg(long, value_parser = ["+", "-"], allow_hyphen_values = true)]
    sign: Option<String>,
    /// Endpoint regularization(s).
    #[arg(long, num_args = 1.., value_name = "F")]
    eps: Option<Vec<f64>>,
    /// Override the tolerance of every residual row.
    #[arg(long, value_name = "F")]
    tol: Option<f64>,
    /// Worker threads.
    #[arg(long, value_name = "INT")]
    jobs: Option<usize>,
    /// Report destination.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// JSON file with any of the above settings; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Exponent(s) n for kz-scalar.
    #[arg(long, num_args = 1.., value_name = "F")]
    n: Option<Vec<f64>>,
    /// Coupling(s) ħ² for kz-scalar, e.g. 0.05 or 0.1i (negative: --hbar2=-0.1i).
    #[arg(long, num_args = 1.., value_name = "Z")]
    hbar2: Option<Vec<String>>,
}

fn resolve(args: SuiteArgs) -> Result<SuiteConfig, Error> {
    let id: SuiteId = args.id.parse()?;
    let file = match &args.config {
        Some(p) => PartialConfig::from_file(p)?,
        None => PartialConfig::default(),
    };
    let flags = PartialConfig {
        suite: None,
        q: args.q,
        cutoff: args.cutoff,
        modes: args.modes,
        sign: args.sign,
        eps: args.eps,
        tol: args.tol,
        jobs: args.jobs,
        out: args.out,
        n: args.n,
        hbar2: args.hbar2,
    };
    SuiteConfig::resolve(id, file.merged(flags))
}

fn main() -> ExitCode {
    let Command::Suite(args) = Cli::parse().command;
    let cfg = match resolve(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qheis: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qheis: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit_report(&report, cfg.out.as_deref()) {
        eprintln!("qheis: cannot write report: {e}");
        return ExitCode::from(2);
    }
    for c in report.failures() {
        eprintln!("FAIL {} residual={:e} tolerance={:e}", c.name, c.residual, c.tolerance);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
