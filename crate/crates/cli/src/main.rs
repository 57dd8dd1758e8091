//! `ewi`: batch front-end for the interferometer routes.

mod output;
mod run;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use run::RunError;
use scenario::{Overrides, RouteName, Scenario, ScenarioError};

/// Worker-count variable; unset uses every core.
const THREADS_VAR: &str = "EWI_THREADS";

#[derive(Parser)]
#[command(name = "ewi", version, about = "Evanescent-wave mirror interferometer spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase-space phase difference and predicted fringe minima.
    Semiclassical(Args),
    /// Eigenfunction-overlap spectrum, recoil averaged or swept over k.
    Stationary(Args),
    /// Time-dependent wave-packet spectrum with quantum jumps.
    Wavepacket(Args),
    /// Stationary and wave-packet spectra with fringe reports and their comparison.
    Compare(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file (TOML); defaults apply when absent.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    p0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// none, isotropic or dipole.
    #[arg(long)]
    recoil: Option<String>,
    #[arg(long)]
    k_nodes: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record deterministic mode in the metadata. Reductions always run in a
    /// fixed order, so results never depend on the worker count.
    #[arg(long)]
    deterministic: bool,
    /// Seed for the sampling estimator.
    #[arg(long)]
    seed: Option<u64>,
}

impl Command {
    fn split(self) -> (RouteName, Args) {
        match self {
            Self::Semiclassical(a) => (RouteName::Semiclassical, a),
            Self::Stationary(a) => (RouteName::Stationary, a),
            Self::Wavepacket(a) => (RouteName::Wavepacket, a),
            Self::Compare(a) => (RouteName::Compare, a),
        }
    }
}

fn fail(kind: &str, message: String, violations: Vec<String>) -> ExitCode {
    let record = json!({ "error": kind, "message": message, "violations": violations });
    eprintln!("{record}");
    ExitCode::FAILURE
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer (got {value:?})"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let (route, args) = Cli::parse().command.split();
    if let Err(e) = configure_threads() {
        return fail("environment", e.clone(), vec![e]);
    }
    let scenario = match &args.scenario {
        Some(path) => Scenario::load(path),
        None => Scenario::parse(""),
    };
    let mut scenario = match scenario {
        Ok(s) => s,
        Err(ScenarioError::Io(m)) => return fail("io", m, Vec::new()),
        Err(ScenarioError::Parse(m)) => return fail("parse", m.clone(), vec![m]),
    };
    scenario.apply(&Overrides {
        p0: args.p0,
        kappa: args.kappa,
        beta: args.beta,
        recoil: args.recoil,
        k_nodes: args.k_nodes,
        out: args.out,
        seed: args.seed,
    });
    match run::run(route, scenario, args.deterministic) {
        Ok(written) => {
            for f in &written.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(RunError::Invalid(v)) => fail("invalid_config", v.join("; "), v),
        Err(RunError::Io(m)) => fail("io", m, Vec::new()),
        Err(RunError::Compute(e)) => fail("compute", e.to_string(), Vec::new()),
    }
}
