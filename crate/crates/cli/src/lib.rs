//! Command-line front end for the inexact extragradient solvers.

pub mod commands;
pub mod config;
pub mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, CliResult, Exit};
use config::RunConfig;

/// Caps the worker pool used by the table sweeps.
pub const THREADS_ENV: &str = "VIP_EXTRAGRAD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "vip-extragrad", version, about = "Extragradient solvers with Frank-Wolfe inexact projections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver and write its per-iteration trace.
    Solve(SolveArgs),
    /// Step-size / tolerance sweep on the 2-d linear problem.
    Table1(OutArgs),
    /// Iteration counts on T_h over dimensions and ball exponents.
    Table3(Table3Args),
    /// Check a candidate solution by sampling and by its natural residual.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table3Args {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated dimensions; defaults to the full grid.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Comma-separated ball exponents.
    #[arg(long, value_delimiter = ',')]
    pub exponents: Option<Vec<f64>>,
}

#[derive(Debug, Args, Default)]
pub struct SolveArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "gamma-bar")]
    pub gamma_bar: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub backtrack: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// `displacement` or `reference`.
    #[arg(long)]
    pub stop: Option<String>,
    #[arg(long = "max-outer")]
    pub max_outer: Option<usize>,
    #[arg(long = "fw-max-iter")]
    pub fw_max_iter: Option<u64>,
    #[arg(long = "fw-floor")]
    pub fw_floor: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub problem: String,
    /// Point as `a,b,...` or a path to a file holding it.
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = vip_core::oracles::DEFAULT_SAMPLING_SEED)]
    pub seed: u64,
    /// Largest accepted natural residual.
    #[arg(long, default_value_t = commands::VERIFY_RESIDUAL_TOL)]
    pub tol: f64,
}

/// Defaults, then `--config`, then flags.
pub fn resolve_config(args: &SolveArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    let s = |v: &Option<f64>| v.map(|x| x.to_string());
    let flags: [(&str, Option<String>); 13] = [
        ("problem", args.problem.clone()),
        ("method", args.method.clone()),
        ("alpha", s(&args.alpha)),
        ("gamma_bar", s(&args.gamma_bar)),
        ("beta", s(&args.beta)),
        ("sigma", s(&args.sigma)),
        ("rho", s(&args.rho)),
        ("backtrack", s(&args.backtrack)),
        ("tol", s(&args.tol)),
        ("stop", args.stop.clone()),
        ("max_outer", args.max_outer.map(|v| v.to_string())),
        ("fw_max_iter", args.fw_max_iter.map(|v| v.to_string())),
        ("fw_floor", s(&args.fw_floor)),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            cfg.set(key, &value)?;
        }
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

/// Honors [`THREADS_ENV`]; a second call is a no-op.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> CliResult<Exit> {
    let mut say = |line: String| writeln!(stdout, "{line}").map_err(CliError::usage);
    match cli.command {
        Command::Solve(args) => {
            let cfg = resolve_config(&args).map_err(CliError::usage)?;
            let report = commands::solve(&cfg)?;
            if cfg.out.is_none() {
                say(report.csv.as_str().trim_end().to_string())?;
            }
            say(report.summary())?;
            Ok(report.exit())
        }
        Command::Table1(args) => {
            let (rows, csv) = commands::table1(args.out.as_deref())?;
            if args.out.is_none() {
                say(csv.as_str().trim_end().to_string())?;
            }
            let stuck = rows.iter().any(|r| r.status != vip_core::SolveStatus::Converged);
            Ok(if stuck { Exit::NoConvergence } else { Exit::Ok })
        }
        Command::Table3(args) => {
            let dims = args.dims.unwrap_or_else(|| commands::TABLE3_DIMS.to_vec());
            let exps = args.exponents.unwrap_or_else(|| commands::TABLE3_EXPONENTS.to_vec());
            let (rows, csv) = commands::table3(&dims, &exps, args.out.as_deref())?;
            if args.out.is_none() {
                say(csv.as_str().trim_end().to_string())?;
            }
            let stuck = rows.iter().any(|r| r.status != vip_core::SolveStatus::Converged);
            Ok(if stuck { Exit::NoConvergence } else { Exit::Ok })
        }
        Command::Verify(args) => {
            let x = commands::parse_point(&args.x)?;
            let report = commands::verify(&args.problem, &x, args.samples, args.seed, args.tol)?;
            say(report.summary())?;
            Ok(if report.passed { Exit::Ok } else { Exit::NoConvergence })
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Errors go to `stderr`, results to `stdout`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { Exit::Usage as i32 } else { Exit::Ok as i32 };
        }
    };
    init_thread_pool();
    match execute(cli, stdout) {
        Ok(code) => code as i32,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit as i32
        }
    }
}
