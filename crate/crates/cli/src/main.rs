//! `conevortex`: batch front-end for vortex experiments.
//!
//! Exit codes: 0 success, 2 infeasible or below threshold, 3 no
//! convergence, 64 usage error or malformed config.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conevortex::torus::Backend;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Infeasible { message: String, reason: String },
    NonConvergence { message: String, best_residual: f64 },
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Infeasible { .. } => EXIT_INFEASIBLE,
            Failure::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible { message: m, .. } | Failure::NonConvergence { message: m, .. } => m,
        }
    }

    /// Body of `failure.json`.
    fn report(&self) -> serde_json::Value {
        match self {
            Failure::Usage(m) => json!({ "status": "error", "exit_code": self.code(), "message": m }),
            Failure::Infeasible { message, reason } => {
                json!({ "status": "infeasible", "exit_code": self.code(), "reason": reason, "message": message })
            }
            Failure::NonConvergence { message, best_residual } => json!({
                "status": "nonconvergence",
                "exit_code": self.code(),
                "best_residual": best_residual,
                "message": message,
            }),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "conevortex", version, about = "Abelian vortices with cone targets on a flat torus")]
struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for random coefficients; overrides the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Derivative discretization; overrides the config.
    #[arg(long, global = true, value_name = "spectral|stencil")]
    backend: Option<Backend>,
    /// Suppress the summary line.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Solve Δf + B e^{2f} = w for given B and w.
    KwSolve,
    /// Build a τ-vortex from theta coefficients and extract its divisor.
    VortexMake,
    /// Gauge-fix a holomorphic map into ℂⁿ to a symplectic vortex.
    SvGaugefix,
    /// Map a stored solution to its modulus field and divisor.
    PiMap,
    /// Check ∫|φ|² against 2(τ·Vol − 2πd) over a list of τ.
    ThresholdScan,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::KwSolve => "kw-solve",
            Command::VortexMake => "vortex-make",
            Command::SvGaugefix => "sv-gaugefix",
            Command::PiMap => "pi-map",
            Command::ThresholdScan => "threshold-scan",
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CONEVORTEX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("CONEVORTEX_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))
}

fn execute<C, F>(cli: &Cli, body: F) -> Result<String, Failure>
where
    C: DeserializeOwned + Serialize + config::Common,
    F: FnOnce(&C, &Path, &mut output::OutputDir) -> Result<String, Failure>,
{
    let path = cli.config.as_deref().ok_or_else(|| Failure::Usage("--config is required".into()))?;
    let mut cfg: C = config::load(path, cli.seed, cli.backend)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out_dir().map(Path::to_path_buf))
        .ok_or_else(|| Failure::Usage("no output directory: pass --out or set `out_dir`".into()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let seed = cfg.seed_mut().expect("seed resolved");
    let backend = cfg.backend_mut().expect("backend resolved");
    commands::run_in(&out, cli.command.name(), &cfg, seed, backend, |dir| body(&cfg, &base, dir))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    init_threads()?;
    match cli.command {
        Command::KwSolve => execute(cli, commands::kw_solve),
        Command::VortexMake => execute(cli, |c, _, d| commands::vortex_make(c, d)),
        Command::SvGaugefix => execute(cli, |c, _, d| commands::sv_gaugefix(c, d)),
        Command::PiMap => execute(cli, commands::pi_map_cmd),
        Command::ThresholdScan => execute(cli, |c, _, d| commands::threshold_scan(c, d)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(summary) => {
            if !cli.quiet {
                eprintln!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("conevortex {}: {}", cli.command.name(), f.message());
            ExitCode::from(f.code())
        }
    }
}
